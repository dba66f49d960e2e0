#pragma once

#include "ngi/mesh.hpp"

#include <functional>

// Procedural test surfaces. All are consistently oriented with normals
// pointing toward +z (or outward for closed shapes).
namespace ngi::shapes {

enum class Diagonal { uniform, alternating };

Mesh single_triangle();
Mesh tetrahedron();
Mesh cube();

// n x n vertices on [0,1]^2 at z = 0. Vertex (row, col) has index row*n+col.
// `alternating` flips the split of every other cell so that, for an odd
// number of cells per side, the mesh is invariant under 90 degree rotation.
Mesh grid(int n, Diagonal diagonal = Diagonal::uniform);

// Grid over [0,1]^2 displaced by z = height(x, y).
Mesh height_field(int n, const std::function<double(double, double)>& height,
                  Diagonal diagonal = Diagonal::alternating);

// Spherical cap of the given radius built from `rings` concentric rings of
// a hexagonal disk (1 + 3 rings (rings + 1) vertices). polar_extent is the
// cap's angular radius; pi/2 gives a hemisphere.
Mesh spherical_cap(int rings, double radius = 0.5, double polar_extent = 1.5707963267948966);

// Closed sphere by loop subdivision of an icosahedron.
Mesh icosphere(int subdivisions, double radius = 1.0);

}  // namespace ngi::shapes
