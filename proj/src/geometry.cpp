#include "wavefield/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace wavefield {

namespace {

constexpr double kEps = 1e-9;

struct Crossing {
  double t;  // along the probe segment
  double u;  // along the wall
};

// Intersection of segment p->q with the wall; nullopt when parallel.
std::optional<Crossing> cross(const Location& p, const Location& q, const Wall& w) {
  const Location r = q - p;
  const Location s = w.end - w.start;
  const double den = r.x() * s.y() - r.y() * s.x();
  if (std::abs(den) < 1e-15) return std::nullopt;
  const Location ap = w.start - p;
  return Crossing{(ap.x() * s.y() - ap.y() * s.x()) / den, (ap.x() * r.y() - ap.y() * r.x()) / den};
}

double distance_to_segment(const Location& x, const Wall& w) {
  const Location s = w.end - w.start;
  const double len2 = s.squaredNorm();
  double t = len2 > 0 ? (x - w.start).dot(s) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (x - (w.start + t * s)).norm();
}

bool blocked(const Scene& scene, const Location& p, const Location& q) {
  for (const auto& w : scene.walls) {
    const auto c = cross(p, q, w);
    if (c && c->t > kEps && c->t < 1.0 - kEps && c->u >= 0.0 && c->u <= 1.0) return true;
  }
  return false;
}

// Validates the wall sequence for one element and appends the path if the
// unfolded route exists and is unobstructed.
void try_sequence(const Scene& scene, const Location& source, const Location& x,
                  const std::vector<std::size_t>& seq, std::vector<Path>& out) {
  std::vector<Location> images{source};
  for (auto w : seq) images.push_back(mirror_across(images.back(), scene.walls[w]));

  std::vector<Location> hits(seq.size());
  Location target = x;
  for (std::size_t k = seq.size(); k-- > 0;) {
    const Wall& w = scene.walls[seq[k]];
    const auto c = cross(images[k + 1], target, w);
    if (!c || c->t <= kEps || c->t >= 1.0 - kEps || c->u < 0.0 || c->u > 1.0) return;
    hits[k] = images[k + 1] + c->t * (target - images[k + 1]);
    target = hits[k];
  }

  Location from = source;
  Complex gamma{1.0, 0.0};
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (blocked(scene, from, hits[k])) return;
    gamma *= scene.walls[seq[k]].reflection;
    from = hits[k];
  }
  if (blocked(scene, from, x)) return;

  out.push_back(Path{images.back(), gamma, 0.0, static_cast<int>(seq.size()), seq});
}

void enumerate_sequences(const Scene& scene, const Location& source, const Location& x,
                         std::vector<std::size_t>& seq, std::vector<Path>& out) {
  if (!seq.empty()) try_sequence(scene, source, x, seq, out);
  if (static_cast<int>(seq.size()) >= scene.max_bounces) return;
  for (std::size_t w = 0; w < scene.walls.size(); ++w) {
    if (!seq.empty() && seq.back() == w) continue;
    seq.push_back(w);
    enumerate_sequences(scene, source, x, seq, out);
    seq.pop_back();
  }
}

}  // namespace

AntennaArray::AntennaArray(std::vector<Location> elements, double reference_wavelength)
    : elements_(std::move(elements)), reference_wavelength_(reference_wavelength) {
  if (elements_.empty()) throw std::invalid_argument("antenna array needs at least one element");
  if (!(reference_wavelength_ > 0)) throw std::invalid_argument("reference wavelength must be positive");
  reference_.setZero();
  for (const auto& e : elements_) reference_ += e;
  reference_ /= static_cast<double>(elements_.size());
}

AntennaArray AntennaArray::ula(std::size_t count, const Location& center, double reference_wavelength) {
  std::vector<Location> elements;
  elements.reserve(count);
  const double spacing = reference_wavelength / 2.0;
  const double mid = (static_cast<double>(count) - 1.0) / 2.0;
  for (std::size_t j = 0; j < count; ++j)
    elements.emplace_back(center.x() + (static_cast<double>(j) - mid) * spacing, center.y());
  return AntennaArray(std::move(elements), reference_wavelength);
}

FrequencyGrid FrequencyGrid::uniform(double reference_hz, double bandwidth_hz, std::size_t count) {
  if (count == 0) throw std::invalid_argument("frequency grid needs at least one frequency");
  FrequencyGrid g{reference_hz, bandwidth_hz, {}};
  g.frequencies.resize(count);
  if (count == 1) {
    g.frequencies[0] = reference_hz;
    return g;
  }
  const double step = bandwidth_hz / static_cast<double>(count - 1);
  const double mid = (static_cast<double>(count) - 1.0) / 2.0;
  for (std::size_t k = 0; k < count; ++k)
    g.frequencies[k] = reference_hz + (static_cast<double>(k) - mid) * step;
  return g;
}

FrequencyGrid FrequencyGrid::lower(std::size_t count) const {
  if (count == 0 || count > frequencies.size()) throw std::invalid_argument("invalid frequency subset size");
  FrequencyGrid g = *this;
  g.frequencies.resize(count);
  return g;
}

bool Bounds::contains(const Location& x) const {
  const double h = side / 2.0 + 1e-12;
  return std::isfinite(x.x()) && std::isfinite(x.y()) && std::abs(x.x()) <= h && std::abs(x.y()) <= h;
}

std::size_t PathSet::total_paths() const {
  std::size_t n = 0;
  for (const auto& p : per_antenna) n += p.size();
  return n;
}

Location mirror_across(const Location& p, const Wall& wall) {
  Location t = wall.end - wall.start;
  const double len = t.norm();
  if (len == 0.0) throw GeometryError("degenerate wall of zero length");
  t /= len;
  const Location n(-t.y(), t.x());
  return p - 2.0 * (p - wall.start).dot(n) * n;
}

PathSet enumerate_paths(const Scene& scene, const Location& x) {
  if (!scene.bounds.contains(x)) throw GeometryError("location outside the scene bounds");
  for (const auto& w : scene.walls)
    if (distance_to_segment(x, w) < kEps) throw GeometryError("location lies on a wall");
  for (const auto& a : scene.array.elements())
    if ((x - a).norm() < kEps) throw GeometryError("location coincides with an antenna element");

  PathSet set;
  set.per_antenna.resize(scene.array.size());
  std::vector<std::size_t> seq;
  for (std::size_t j = 0; j < scene.array.size(); ++j) {
    const Location& a = scene.array.element(j);
    auto& out = set.per_antenna[j];
    if (scene.los_enabled && !blocked(scene, a, x)) out.push_back(Path{a, {1.0, 0.0}, 0.0, 0, {}});
    enumerate_sequences(scene, a, x, seq, out);
  }
  return set;
}

ChannelMatrix channel_response(const PathSet& paths, const Location& x, const FrequencyGrid& grid) {
  ChannelMatrix h;
  h.location = x;
  h.entries = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(paths.antenna_count()),
                                     static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < paths.antenna_count(); ++j) {
    for (const auto& p : paths.per_antenna[j]) {
      const double d = (x - p.virtual_source).norm();
      if (!(d > 1e-12)) throw GeometryError("location coincides with a virtual source");
      const double delay = d / kSpeedOfLight - p.nu;
      for (std::size_t k = 0; k < grid.size(); ++k)
        h.entries(j, k) += p.gamma / d * std::polar(1.0, -2.0 * kPi * grid.frequencies[k] * delay);
    }
  }
  return h;
}

std::vector<Impulse> impulse_response(const PathSet& paths, const Location& x, std::size_t antenna) {
  std::vector<Impulse> train;
  for (const auto& p : paths.per_antenna.at(antenna)) {
    const double d = (x - p.virtual_source).norm();
    if (!(d > 1e-12)) throw GeometryError("location coincides with a virtual source");
    train.push_back({d / kSpeedOfLight - p.nu, p.gamma / d});
  }
  std::stable_sort(train.begin(), train.end(), [](const Impulse& a, const Impulse& b) { return a.delay < b.delay; });
  return train;
}

ChannelMatrix simulate_channel(const Scene& scene, const Location& x, const FrequencyGrid& grid) {
  return channel_response(enumerate_paths(scene, x), x, grid);
}

}  // namespace wavefield
