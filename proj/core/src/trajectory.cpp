#include "i2a/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "i2a/errors.hpp"

namespace i2a {

void Trajectory::validate() const {
  if (size() < 2) throw InputError("trajectory needs at least 2 samples");
  if (!(dt > 0.0)) throw InputError("trajectory dt must be positive");
  if (!samples.allFinite())
    throw NumericError("trajectory contains non-finite samples");
}

void save_trajectory(const std::string& path, const Trajectory& traj) {
  traj.validate();
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open for writing: " + path);
  char buf[96];
  os << "# i2a-trajectory v1\n";
  std::snprintf(buf, sizeof buf, "# dt %.17g\n", traj.dt);
  os << buf;
  os << "# axes x y z\n";
  os << "# samples " << traj.size() << "\n";
  for (int i = 0; i < traj.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", traj.samples(i, 0),
                  traj.samples(i, 1), traj.samples(i, 2));
    os << buf;
  }
  if (!os) throw FormatError("write failed: " + path);
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open trajectory file: " + path);

  Trajectory traj;
  bool have_dt = false;
  std::vector<Eigen::Vector3d> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "dt") {
        hs >> traj.dt;
        have_dt = true;
      }
      continue;
    }
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    Eigen::Vector3d p;
    if (!(ls >> p.x() >> p.y() >> p.z()))
      throw FormatError("bad sample line in " + path + ": " + line);
    rows.push_back(p);
  }
  if (!have_dt) throw FormatError("trajectory file missing '# dt' header");
  traj.samples.resize(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i)
    traj.samples.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  traj.validate();
  return traj;
}

}  // namespace i2a
