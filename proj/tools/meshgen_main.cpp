#include <iostream>

#include "CLI11.hpp"
#include "xfield/shapes.hpp"

// Emits the built-in test domains as OFF files.
int main(int argc, char** argv) {
  CLI::App app{"Generate triangle meshes for the built-in test domains"};
  std::string name;
  std::string out = "mesh.off";
  int resolution = 0;
  app.add_option("domain", name,
                 "square|disk|halfdisk|hexagon|annulus|lshape|ublock|twohole|mushroom|squarehole")
      ->required();
  app.add_option("-o,--out", out, "output OFF file");
  app.add_option("-n,--resolution", resolution, "resolution (rings or cells per unit)");
  CLI11_PARSE(app, argc, argv);

  try {
    xf::TriMesh mesh = xf::make_named_domain(name, resolution);
    xf::save_off(mesh, out);
    std::cout << out << ": " << mesh.vertex_count() << " vertices, " << mesh.face_count()
              << " triangles, " << mesh.boundary_loops.size() << " boundary loop(s)\n";
  } catch (const xf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
