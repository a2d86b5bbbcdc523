#include "dnf/trajectory_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include <json.hpp>

namespace dnf {

namespace {

using nlohmann::json;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct Reader {
  const std::vector<std::uint8_t>& buf;
  size_t pos = 0;
  std::uint32_t u32() {
    if (pos + 4 > buf.size()) throw io_error("trajectory file truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    if (pos + 8 > buf.size()) throw io_error("trajectory file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
};

json spec_to_json(const PotentialSpec& s) {
  json j;
  j["family"] = s.family;
  j["epsilon"] = s.epsilon;
  j["diag"] = s.diag;
  if (s.has_bounds_override) {
    j["bounds"] = {{"theta", s.bounds_override.theta},   {"Theta", s.bounds_override.Theta},
                   {"lambda", s.bounds_override.lambda}, {"Lambda", s.bounds_override.Lambda},
                   {"alpha", s.bounds_override.alpha},
                   {"holder_const", s.bounds_override.holder_const}};
  }
  return j;
}

PotentialSpec spec_from_json(const json& j) {
  PotentialSpec s;
  s.family = j.at("family").get<std::string>();
  s.epsilon = j.at("epsilon").get<double>();
  s.diag = j.at("diag").get<std::vector<double>>();
  if (j.contains("bounds")) {
    const json& b = j.at("bounds");
    s.has_bounds_override = true;
    s.bounds_override.theta = b.at("theta").get<double>();
    s.bounds_override.Theta = b.at("Theta").get<double>();
    s.bounds_override.lambda = b.at("lambda").get<double>();
    s.bounds_override.Lambda = b.at("Lambda").get<double>();
    s.bounds_override.alpha = b.at("alpha").get<double>();
    s.bounds_override.holder_const = b.at("holder_const").get<double>();
  }
  return s;
}

}  // namespace

std::uint64_t fnv1a64(const void* data, size_t len, std::uint64_t seed) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::uint64_t h = seed;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  traj.validate();
  std::vector<std::uint8_t> body;
  body.reserve(64 + traj.snapshots.size() * traj.snapshots[0].values.size() * 8);

  put_u32(body, kTrajectoryVersion);
  put_u32(body, static_cast<std::uint32_t>(traj.domain.n));
  put_u32(body, static_cast<std::uint32_t>(traj.m));
  for (int d = 0; d < traj.domain.n; ++d) {
    put_u32(body, static_cast<std::uint32_t>(traj.domain.cells[d]));
  }
  for (int d = 0; d < traj.domain.n; ++d) put_f64(body, traj.domain.lo[d]);
  for (int d = 0; d < traj.domain.n; ++d) put_f64(body, traj.domain.hi[d]);
  put_u32(body, static_cast<std::uint32_t>(traj.steps()));
  put_f64(body, traj.tau);
  put_f64(body, traj.solver_tol);

  json meta;
  meta["psi"] = spec_to_json(traj.psi_spec);
  meta["F"] = spec_to_json(traj.F_spec);
  const std::string meta_str = meta.dump();
  put_u32(body, static_cast<std::uint32_t>(meta_str.size()));
  body.insert(body.end(), meta_str.begin(), meta_str.end());

  for (const auto& snap : traj.snapshots) {
    for (double v : snap.values) put_f64(body, v);
  }

  const std::uint64_t checksum = fnv1a64(body.data(), body.size());

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw io_error("cannot open '" + path.string() + "' for writing");
  os.write(kTrajectoryMagic, 4);
  os.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  std::vector<std::uint8_t> trailer;
  put_u64(trailer, checksum);
  os.write(reinterpret_cast<const char*>(trailer.data()), 8);
  if (!os) throw io_error("write failed for '" + path.string() + "'");
}

namespace {

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(is)),
                                std::istreambuf_iterator<char>());
  return buf;
}

}  // namespace

Trajectory read_trajectory(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> buf = read_all(path);
  if (buf.size() < 12 || std::memcmp(buf.data(), kTrajectoryMagic, 4) != 0) {
    throw io_error("'" + path.string() + "' is not a trajectory file (bad magic)");
  }
  const size_t body_len = buf.size() - 4 - 8;
  const std::uint64_t declared =
      [&] {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
          v |= static_cast<std::uint64_t>(buf[buf.size() - 8 + i]) << (8 * i);
        }
        return v;
      }();
  if (fnv1a64(buf.data() + 4, body_len) != declared) {
    throw io_error("'" + path.string() + "' failed its checksum");
  }

  std::vector<std::uint8_t> body(buf.begin() + 4, buf.end() - 8);
  Reader r{body};
  const std::uint32_t version = r.u32();
  if (version != kTrajectoryVersion) {
    throw io_error("unsupported trajectory version " + std::to_string(version));
  }
  const int n = static_cast<int>(r.u32());
  const int m = static_cast<int>(r.u32());
  if (n < 1 || n > kMaxDim || m < 1) throw io_error("corrupt trajectory header");
  std::array<int, kMaxDim> cells{0, 0};
  std::array<double, kMaxDim> lo{0.0, 0.0}, hi{0.0, 0.0};
  for (int d = 0; d < n; ++d) cells[d] = static_cast<int>(r.u32());
  for (int d = 0; d < n; ++d) lo[d] = r.f64();
  for (int d = 0; d < n; ++d) hi[d] = r.f64();
  const int N = static_cast<int>(r.u32());
  const double tau = r.f64();
  const double solver_tol = r.f64();
  const std::uint32_t meta_len = r.u32();
  if (r.pos + meta_len > body.size()) throw io_error("trajectory metadata overruns the file");
  const std::string meta_str(body.begin() + r.pos, body.begin() + r.pos + meta_len);
  r.pos += meta_len;

  Trajectory traj;
  try {
    traj.domain = BoxDomain(n, lo, hi, cells);
  } catch (const config_error& e) {
    throw io_error(std::string("corrupt trajectory header: ") + e.what());
  }
  traj.m = m;
  traj.tau = tau;
  traj.solver_tol = solver_tol;
  try {
    const json meta = json::parse(meta_str);
    traj.psi_spec = spec_from_json(meta.at("psi"));
    traj.F_spec = spec_from_json(meta.at("F"));
  } catch (const json::exception& e) {
    throw io_error(std::string("corrupt trajectory metadata: ") + e.what());
  }

  const size_t per_snap = static_cast<size_t>(traj.domain.node_count()) * m;
  const size_t expect = r.pos + (static_cast<size_t>(N) + 1) * per_snap * 8;
  if (expect != body.size()) {
    throw io_error("trajectory payload length disagrees with its header");
  }
  traj.snapshots.reserve(N + 1);
  for (int k = 0; k <= N; ++k) {
    SnapshotField f(traj.domain, m);
    for (size_t i = 0; i < per_snap; ++i) f.values[i] = r.f64();
    traj.snapshots.push_back(std::move(f));
  }
  traj.validate();
  return traj;
}

std::uint64_t trajectory_payload_checksum(const std::filesystem::path& path) {
  const Trajectory traj = read_trajectory(path);
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& snap : traj.snapshots) {
    h = fnv1a64(snap.values.data(), snap.values.size() * sizeof(double), h);
  }
  return h;
}

void write_step_reports(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw io_error("cannot open '" + path.string() + "' for writing");
  for (const auto& rep : traj.reports) {
    nlohmann::json j;
    j["k"] = rep.step;
    j["iterations"] = rep.newton_iterations;
    j["residual"] = rep.final_residual;
    j["functional"] = rep.functional_values.empty() ? 0.0 : rep.functional_values.back();
    os << j.dump() << "\n";
  }
}

}  // namespace dnf
