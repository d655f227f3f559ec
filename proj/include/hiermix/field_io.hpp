#pragma once

#include "hiermix/hier_mesh.hpp"

#include <iosfwd>
#include <string>

namespace hiermix {

/// Lowest-order velocity field of element e at a point inside it.
Vec2 element_velocity(const HierMesh& mesh, const Vector& U, int e, const Vec2& x);

/// Legacy-format unstructured-grid snapshot: one point block per subdomain
/// (interface vertices appear once per side), triangle cells, and cell data
/// holding the pressure and the centroid velocity.
void write_vtk(std::ostream& out, const std::string& title, const HierMesh& mesh,
               const Vector& P, const Vector& U);
void write_vtk_file(const std::string& path, const std::string& title,
                    const HierMesh& mesh, const Vector& P, const Vector& U);

/// Per-cell table: centroid, subdomain, pressure, centroid velocity.
void write_cell_csv(std::ostream& out, const HierMesh& mesh, const Vector& P,
                    const Vector& U);
void write_cell_csv_file(const std::string& path, const HierMesh& mesh,
                         const Vector& P, const Vector& U);

}  // namespace hiermix
