#include "percreg/field.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

namespace percreg {

namespace {

// Largest window we agree to materialize, in edge bits (2 GiB of mask).
constexpr std::int64_t kMaxEdgeBits = std::int64_t{1} << 34;

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("probability must lie in [0, 1]");
}

}  // namespace

Edge edge_between(const Vertex& a, const Vertex& b, int d) {
  int axis = -1;
  for (int k = 0; k < d; ++k) {
    const int diff = b[k] - a[k];
    if (diff == 0) continue;
    if ((diff != 1 && diff != -1) || axis != -1) {
      throw DomainError("vertices " + to_string(a, d) + " and " + to_string(b, d) +
                        " are not nearest neighbours");
    }
    axis = k;
  }
  if (axis == -1) throw DomainError("an edge needs two distinct vertices");
  return Edge{b[axis] > a[axis] ? a : b, axis};
}

std::string to_string(Coupling c) {
  return c == Coupling::monotone ? "monotone" : "two-source";
}

Coupling coupling_from_string(const std::string& s) {
  if (s == "monotone") return Coupling::monotone;
  if (s == "two-source" || s == "two_source") return Coupling::two_source;
  throw ParameterError("unknown coupling '" + s + "'");
}

EdgeField::EdgeField(const LatticeWindow& w, std::uint64_t seed, Coupling c, double q)
    : window_(w), seed_(seed), coupling_(c), q_(q) {
  if (w.vertex_count() > kMaxEdgeBits / w.dim()) {
    throw CapacityError("window with " + std::to_string(w.vertex_count()) +
                        " vertices exceeds the addressable edge budget");
  }
  lane_base_[0] = mix64(seed ^ 0x2545f4914f6cdd1dULL);
  lane_base_[1] = mix64(seed ^ 0x9fb21c651e98df25ULL);
}

EdgeField EdgeField::monotone(const LatticeWindow& window, std::uint64_t seed) {
  return EdgeField(window, seed, Coupling::monotone, 0.0);
}

EdgeField EdgeField::two_source(const LatticeWindow& window, std::uint64_t seed, double q) {
  check_probability(q);
  if (q == 0.0) throw ParameterError("two-source coupling needs q > 0");
  return EdgeField(window, seed, Coupling::two_source, q);
}

std::uint64_t EdgeField::hash(const Edge& e, int lane) const {
  std::uint64_t h = mix64(lane_base_[lane] ^ static_cast<std::uint64_t>(e.axis));
  for (int k = 0; k < dim(); ++k) {
    h = mix64(h ^ static_cast<std::uint32_t>(e.lo[k]));
  }
  return h;
}

double EdgeField::uniform(const Edge& e, int lane) const {
  return static_cast<double>(hash(e, lane) >> 11) * 0x1.0p-53;
}

void EdgeField::check_parameter(double p) const {
  check_probability(p);
  if (coupling_ == Coupling::two_source && p > q_) {
    throw ParameterError("two-source field built for q = " + std::to_string(q_) +
                         " cannot be queried at p = " + std::to_string(p));
  }
}

bool EdgeField::open(const Edge& e, double p) const {
  check_parameter(p);
  if (coupling_ == Coupling::monotone) return uniform(e, 0) < p;
  return uniform(e, 0) < q_ && uniform(e, 1) < p / q_;
}

OpenMask EdgeField::materialize(const Region& region, double p) const {
  check_parameter(p);
  OpenMask mask(region, p);
  const int d = dim();
  const double ratio = coupling_ == Coupling::two_source ? p / q_ : 0.0;
  for (std::int64_t idx = 0; idx < region.volume(); ++idx) {
    const Coord x = region.point(idx);
    for (int k = 0; k < d; ++k) {
      if (x[k] == region.hi()[k]) continue;
      const Edge e{Vertex{x}, k};
      bool is_open;
      if (coupling_ == Coupling::monotone) {
        is_open = uniform(e, 0) < p;
      } else {
        is_open = uniform(e, 0) < q_ && uniform(e, 1) < ratio;
      }
      if (is_open) mask.set_open(idx, k);
    }
  }
  return mask;
}

OpenMask EdgeField::materialize(double p) const { return materialize(window_.region(), p); }

OpenMask::OpenMask(Region region, double p) : region_(std::move(region)), p_(p) {
  const auto nbits = static_cast<std::uint64_t>(region_.volume()) * region_.dim();
  bits_.assign((nbits + 63) / 64, 0);
}

bool OpenMask::open(const Edge& e) const {
  if (!region_.contains(e.lo.c)) return false;
  if (e.lo[e.axis] >= region_.hi()[e.axis]) return false;
  return open(region_.index(e.lo.c), e.axis);
}

bool OpenMask::open_between(const Vertex& a, const Vertex& b) const {
  return open(edge_between(a, b, dim()));
}

std::int64_t OpenMask::open_count() const {
  std::int64_t n = 0;
  for (std::uint64_t w : bits_) n += std::popcount(w);
  return n;
}

std::vector<std::uint64_t> FieldSnapshot::open_edge_ids() const {
  std::vector<std::uint64_t> ids;
  for (const auto& [start, len] : runs) {
    for (std::uint64_t k = 0; k < len; ++k) ids.push_back(start + k);
  }
  return ids;
}

FieldSnapshot snapshot(const EdgeField& field, double p) {
  const LatticeWindow& w = field.window();
  const OpenMask mask = field.materialize(p);
  FieldSnapshot s;
  s.d = w.dim();
  s.L = w.half_side();
  s.N = w.box_scale();
  s.coupling = field.coupling();
  s.q = field.coupling() == Coupling::two_source ? field.q() : 0.0;
  s.p = p;
  s.seed = field.seed();
  s.edge_id_count = static_cast<std::uint64_t>(w.vertex_count()) * w.dim();
  std::uint64_t run_start = 0, run_len = 0;
  for (std::uint64_t id = 0; id < s.edge_id_count; ++id) {
    const bool is_open = mask.open(static_cast<std::int64_t>(id / w.dim()),
                                   static_cast<int>(id % w.dim()));
    if (is_open) {
      if (run_len == 0) run_start = id;
      ++run_len;
    } else if (run_len > 0) {
      s.runs.emplace_back(run_start, run_len);
      run_len = 0;
    }
  }
  if (run_len > 0) s.runs.emplace_back(run_start, run_len);
  return s;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

template <class T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw ConfigError("truncated field snapshot");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

constexpr char kMagic[4] = {'P', 'R', 'F', 'S'};
constexpr std::uint32_t kSnapshotVersion = 1;

}  // namespace

void write_snapshot(std::ostream& out, const FieldSnapshot& s) {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.d));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.L));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.N));
  put<std::uint32_t>(out, s.coupling == Coupling::monotone ? 0u : 1u);
  put<double>(out, s.q);
  put<double>(out, s.p);
  put<std::uint64_t>(out, s.seed);
  put<std::uint64_t>(out, s.edge_id_count);
  put<std::uint64_t>(out, s.runs.size());
  for (const auto& [start, len] : s.runs) {
    put<std::uint64_t>(out, start);
    put<std::uint64_t>(out, len);
  }
}

FieldSnapshot read_snapshot(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("not a field snapshot (bad magic)");
  }
  if (get<std::uint32_t>(in) != kSnapshotVersion) {
    throw ConfigError("unsupported field snapshot version");
  }
  FieldSnapshot s;
  s.d = static_cast<int>(get<std::uint32_t>(in));
  s.L = static_cast<int>(get<std::uint32_t>(in));
  s.N = static_cast<int>(get<std::uint32_t>(in));
  s.coupling = get<std::uint32_t>(in) == 0 ? Coupling::monotone : Coupling::two_source;
  s.q = get<double>(in);
  s.p = get<double>(in);
  s.seed = get<std::uint64_t>(in);
  s.edge_id_count = get<std::uint64_t>(in);
  const auto nruns = get<std::uint64_t>(in);
  s.runs.reserve(static_cast<std::size_t>(nruns));
  for (std::uint64_t r = 0; r < nruns; ++r) {
    const auto start = get<std::uint64_t>(in);
    const auto len = get<std::uint64_t>(in);
    s.runs.emplace_back(start, len);
  }
  return s;
}

}  // namespace percreg
