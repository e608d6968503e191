#include "roughbie/io.hpp"

#include <fstream>

namespace roughbie {

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  body(os);
  if (!os) throw Error("write to '" + path.string() + "' failed");
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

void write_densities_csv(const PanelMesh& mesh, const Densities& d, double omega_mu1,
                         std::ostream& os) {
  os << "x,y,z,tag,ReEx,ImEx,ReEy,ImEy,ReEz,ImEz,ReHx,ImHx,ReHy,ImHy,ReHz,ImHz\n";
  os.precision(17);
  auto put = [&](const CVec3& v) {
    for (int k = 0; k < 3; ++k) os << ',' << v(k).real() << ',' << v(k).imag();
  };
  for (int i = 0; i < mesh.size(); ++i) {
    const Node& n = mesh.nodes[i];
    os << n.x.x() << ',' << n.x.y() << ',' << n.x.z() << ',';
    if (n.tag == Tag::S) {
      os << "on_S";
      put(d.a1[i]);
      put(d.b1[i] / omega_mu1);
    } else {
      const int k = i - mesh.num_s;
      os << "on_Gamma";
      put(d.d[k]);
      put(d.c[k] / omega_mu1);
    }
    os << '\n';
  }
}

nlohmann::json report_json(const SolveReport& r) {
  return {{"method", r.method},
          {"residual", r.residual},
          {"condition_estimate", r.condition_estimate},
          {"iterations", r.iterations},
          {"wall_time", r.wall_time},
          {"unknowns", r.unknowns},
          {"history", r.history}};
}

}  // namespace roughbie
