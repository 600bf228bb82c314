#include "cheeger/scenarios.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "cheeger/errors.hpp"

namespace cheeger::scenarios {

using manifold::Chart;
using manifold::Interval;
using manifold::Scenario;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBandEdge = 0.4;
constexpr double kHopfEdge = 0.2;

// Rotation angle of a 2x2 block of a circle-group element.
double circle_angle(const Matrix& m, int block = 0) {
  return std::atan2(m(block + 1, block), m(block, block));
}

class S2Band final : public Scenario {
 public:
  S2Band(std::string id, double warp, double margin)
      : Scenario(lie::LieGroupModel::u1(),
                 Chart({"theta", "phi"}, {{0.0, 2 * kPi, true}, {kBandEdge, kPi - kBandEdge, false}}),
                 margin),
        id_(std::move(id)),
        warp_(warp) {
    if (!(warp > -1.0)) throw ConfigError("warp_amplitude must be > -1 (metric must stay positive)");
  }

  std::string id() const override { return id_; }
  std::vector<std::pair<std::string, double>> parameters() const override {
    return {{"margin", margin()}, {"warp_amplitude", warp_}};
  }

  Point act(const lie::GroupElement& g, const Point& x) const override {
    Point y = x;
    y(0) += circle_angle(g.matrix);
    return y;
  }

  Matrix metric(const Point& x) const override {
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = warp(x(1));
    g(1, 1) = 1.0;
    return g;
  }

  std::optional<std::vector<Matrix>> metric_derivatives(const Point& x) const override {
    const double s = std::sin(x(1));
    const double c = std::cos(x(1));
    Matrix d_phi = Matrix::Zero(2, 2);
    d_phi(0, 0) = 2 * s * c * (1 + warp_ * s) + s * s * warp_ * c;
    return std::vector<Matrix>{Matrix::Zero(2, 2), d_phi};
  }

  std::optional<Matrix> killing_analytic(const Point&) const override {
    Matrix k(2, 1);
    k << 1.0, 0.0;
    return k;
  }

  std::optional<Matrix> action_jacobian(const lie::GroupElement&, const Point&) const override {
    return Matrix::Identity(2, 2);
  }

  int orbit_dim() const override { return 1; }
  Vector orbit_coordinates(const Point& x) const override { return x.tail(1); }
  std::vector<Point> default_geodesic_starts() const override {
    return {Point{{0.0, 0.6}}, Point{{0.0, 0.9}}, Point{{0.0, 1.2}}};
  }
  bool orbits_totally_geodesic() const override { return false; }

 private:
  double warp(double phi) const {
    const double s = std::sin(phi);
    return s * s * (1 + warp_ * s);
  }

  std::string id_;
  double warp_;
};

class S3Hopf final : public Scenario {
 public:
  S3Hopf(double fiber_scale, double margin)
      : Scenario(lie::LieGroupModel::u1(),
                 Chart({"eta", "xi1", "xi2"}, {{kHopfEdge, kPi / 2 - kHopfEdge, false},
                                               {0.0, 2 * kPi, true},
                                               {0.0, 2 * kPi, true}}),
                 margin),
        scale_(fiber_scale) {
    if (!(fiber_scale > 0.0)) throw ConfigError("fiber_scale must be positive");
  }

  std::string id() const override { return "s3_hopf"; }
  std::vector<std::pair<std::string, double>> parameters() const override {
    return {{"fiber_scale", scale_}, {"margin", margin()}};
  }

  Point act(const lie::GroupElement& g, const Point& x) const override {
    const double t = circle_angle(g.matrix);
    Point y = x;
    y(1) += t;
    y(2) += t;
    return y;
  }

  // Round metric plus (s^2 - 1) w (x) w, w = g_round(Hopf field, .).
  Matrix metric(const Point& x) const override {
    const double c = std::cos(x(0));
    const double s = std::sin(x(0));
    Matrix g = Matrix::Zero(3, 3);
    g(0, 0) = 1.0;
    g(1, 1) = c * c;
    g(2, 2) = s * s;
    const Vector w = hopf_form(c, s);
    g += (scale_ * scale_ - 1.0) * w * w.transpose();
    return g;
  }

  std::optional<std::vector<Matrix>> metric_derivatives(const Point& x) const override {
    const double c = std::cos(x(0));
    const double s = std::sin(x(0));
    Matrix d_eta = Matrix::Zero(3, 3);
    d_eta(1, 1) = -2 * c * s;
    d_eta(2, 2) = 2 * c * s;
    const Vector w = hopf_form(c, s);
    Vector dw = Vector::Zero(3);
    dw(1) = -2 * c * s;
    dw(2) = 2 * c * s;
    d_eta += (scale_ * scale_ - 1.0) * (dw * w.transpose() + w * dw.transpose());
    return std::vector<Matrix>{d_eta, Matrix::Zero(3, 3), Matrix::Zero(3, 3)};
  }

  std::optional<Matrix> killing_analytic(const Point&) const override {
    Matrix k(3, 1);
    k << 0.0, 1.0, 1.0;
    return k;
  }

  std::optional<Matrix> action_jacobian(const lie::GroupElement&, const Point&) const override {
    return Matrix::Identity(3, 3);
  }

  int orbit_dim() const override { return 1; }
  Vector orbit_coordinates(const Point& x) const override {
    return Vector{{x(0), x(1) - x(2)}};
  }
  std::vector<Point> default_geodesic_starts() const override {
    return {Point{{0.5, 0.0, 0.0}}, Point{{0.8, 0.0, 0.0}}, Point{{1.1, 0.0, 0.0}}};
  }
  bool orbits_totally_geodesic() const override { return true; }

 private:
  static Vector hopf_form(double c, double s) {
    Vector w = Vector::Zero(3);
    w(1) = c * c;
    w(2) = s * s;
    return w;
  }

  double scale_;
};

class Su2S2 final : public Scenario {
 public:
  Su2S2(double radius, double margin)
      : Scenario(lie::LieGroupModel::su2(),
                 Chart({"theta", "phi"}, {{0.0, 2 * kPi, true}, {kBandEdge, kPi - kBandEdge, false}}),
                 margin),
        radius_(radius) {
    if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  }

  std::string id() const override { return "su2_s2"; }
  std::vector<std::pair<std::string, double>> parameters() const override {
    return {{"margin", margin()}, {"radius", radius_}};
  }

  Point act(const lie::GroupElement& g, const Point& x) const override {
    const Vector q = g.matrix.col(0);
    const Eigen::Quaterniond quat(q(0), q(1), q(2), q(3));
    const Eigen::Vector3d w = quat.normalized().toRotationMatrix() * embed(x);
    Point y(2);
    y(0) = std::atan2(w.y(), w.x());
    y(1) = std::atan2(std::hypot(w.x(), w.y()), w.z());
    return chart().unwrap_near(y, x);
  }

  Matrix metric(const Point& x) const override {
    const double s = std::sin(x(1));
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = radius_ * radius_ * s * s;
    g(1, 1) = radius_ * radius_;
    return g;
  }

  std::optional<std::vector<Matrix>> metric_derivatives(const Point& x) const override {
    Matrix d_phi = Matrix::Zero(2, 2);
    d_phi(0, 0) = radius_ * radius_ * 2 * std::sin(x(1)) * std::cos(x(1));
    return std::vector<Matrix>{Matrix::Zero(2, 2), d_phi};
  }

  // exp(t e_i) rotates R^3 by angle t about the i-th axis, so the Killing
  // field of e_i is axis_i x v, converted to (theta, phi) components.
  std::optional<Matrix> killing_analytic(const Point& x) const override {
    const double st = std::sin(x(0)), ct = std::cos(x(0));
    const double sp = std::sin(x(1)), cp = std::cos(x(1));
    const Eigen::Vector3d v = embed(x);
    const Eigen::Vector3d d_theta(-sp * st, sp * ct, 0.0);
    const Eigen::Vector3d d_phi(cp * ct, cp * st, -sp);
    Matrix k(2, 3);
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector3d w = Eigen::Vector3d::Unit(i).cross(v);
      k(0, i) = w.dot(d_theta) / (sp * sp);
      k(1, i) = w.dot(d_phi);
    }
    return k;
  }

  int orbit_dim() const override { return 2; }
  Vector orbit_coordinates(const Point&) const override { return Vector(0); }
  std::vector<Point> default_geodesic_starts() const override { return {Point{{0.0, 0.9}}}; }
  bool orbits_totally_geodesic() const override { return true; }

 private:
  static Eigen::Vector3d embed(const Point& x) {
    return {std::sin(x(1)) * std::cos(x(0)), std::sin(x(1)) * std::sin(x(0)), std::cos(x(1))};
  }

  double radius_;
};

class FlatT2 final : public Scenario {
 public:
  FlatT2(double orbit_length, bool full_torus)
      : Scenario(full_torus ? lie::LieGroupModel::t2() : lie::LieGroupModel::u1(),
                 Chart({"x1", "x2"}, {{0.0, 2 * kPi, true}, {0.0, 2 * kPi, true}}), 0.0),
        length_(orbit_length),
        full_(full_torus) {
    if (!(orbit_length > 0.0)) throw ConfigError("orbit_length must be positive");
  }

  std::string id() const override { return "flat_t2"; }
  std::vector<std::pair<std::string, double>> parameters() const override {
    return {{"full_torus", full_ ? 1.0 : 0.0}, {"orbit_length", length_}};
  }

  Point act(const lie::GroupElement& g, const Point& x) const override {
    Point y = x;
    y(0) += circle_angle(g.matrix, 0);
    if (full_) y(1) += circle_angle(g.matrix, 2);
    return y;
  }

  Matrix metric(const Point&) const override {
    Matrix g = Matrix::Identity(2, 2);
    g(0, 0) = length_ * length_;
    return g;
  }

  std::optional<std::vector<Matrix>> metric_derivatives(const Point&) const override {
    return std::vector<Matrix>{Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
  }

  std::optional<Matrix> killing_analytic(const Point&) const override {
    if (full_) return Matrix::Identity(2, 2);
    Matrix k(2, 1);
    k << 1.0, 0.0;
    return k;
  }

  std::optional<Matrix> action_jacobian(const lie::GroupElement&, const Point&) const override {
    return Matrix::Identity(2, 2);
  }

  int orbit_dim() const override { return full_ ? 2 : 1; }
  Vector orbit_coordinates(const Point& x) const override {
    return full_ ? Vector(0) : Vector(x.tail(1));
  }
  std::vector<Point> default_geodesic_starts() const override {
    return {Point{{0.0, 1.0}}, Point{{0.0, 2.0}}, Point{{0.0, 3.0}}};
  }
  bool orbits_totally_geodesic() const override { return true; }

 private:
  double length_;
  bool full_;
};

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
    throw ConfigError("scenario." + key + ": expected a number, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("scenario." + key + ": expected true/false, got '" + value + "'");
}

const ScenarioInfo& info_for(const std::string& id) {
  for (const auto& info : catalog()) {
    if (info.id == id) return info;
  }
  std::string known;
  for (const auto& info : catalog()) known += (known.empty() ? "" : ", ") + info.id;
  throw ConfigError("unknown scenario '" + id + "' (known: " + known + ")");
}

}  // namespace

const std::vector<ScenarioInfo>& catalog() {
  static const std::vector<ScenarioInfo> entries = {
      {"s2_band",
       "S^1 rotating the band phi in [0.4, pi-0.4] of the round S^2",
       {{"margin", "0.1", "distance of the sample region from the band edges"}}},
      {"warped_s2",
       "S^1 on the warped band g = dphi^2 + sin^2(phi)(1 + a sin(phi)) dtheta^2",
       {{"margin", "0.1", "distance of the sample region from the band edges"},
        {"warp_amplitude", "0.3", "warp amplitude a (> -1)"}}},
      {"s3_hopf",
       "Hopf S^1 on S^3, Hopf coordinates eta in [0.2, pi/2-0.2]",
       {{"fiber_scale", "1", "length of the Hopf field (1 = round, otherwise Berger)"},
        {"margin", "0.1", "distance of the sample region from the eta edges"}}},
      {"su2_s2",
       "SU(2) acting transitively on S^2 = SU(2)/U(1), chart phi in [0.4, pi-0.4]",
       {{"margin", "0.1", "distance of the sample region from the chart edges"},
        {"radius", "1", "sphere radius"}}},
      {"flat_t2",
       "first-factor S^1 (or all of T^2) translating the flat torus a^2 dx1^2 + dx2^2",
       {{"full_torus", "false", "act by all of T^2 instead of the first factor"},
        {"orbit_length", "1", "orbit length parameter a"}}},
  };
  return entries;
}

std::shared_ptr<const Scenario> make_scenario(const std::string& id, const ScenarioParams& params) {
  const ScenarioInfo& info = info_for(id);
  ScenarioParams values;
  for (const auto& p : info.parameters) values[p.key] = p.default_value;
  for (const auto& [key, value] : params) {
    if (!values.count(key)) {
      throw ConfigError("unknown parameter 'scenario." + key + "' for scenario " + id);
    }
    values[key] = value;
  }
  auto num = [&](const std::string& key) { return parse_double(key, values.at(key)); };

  if (id == "s2_band") return std::make_shared<S2Band>("s2_band", 0.0, num("margin"));
  if (id == "warped_s2") {
    return std::make_shared<S2Band>("warped_s2", num("warp_amplitude"), num("margin"));
  }
  if (id == "s3_hopf") return std::make_shared<S3Hopf>(num("fiber_scale"), num("margin"));
  if (id == "su2_s2") return std::make_shared<Su2S2>(num("radius"), num("margin"));
  return std::make_shared<FlatT2>(num("orbit_length"),
                                  parse_bool("full_torus", values.at("full_torus")));
}

std::shared_ptr<const Scenario> make_s2_band(double warp, double margin) {
  return std::make_shared<S2Band>(warp == 0.0 ? "s2_band" : "warped_s2", warp, margin);
}

std::shared_ptr<const Scenario> make_s3_hopf(double fiber_scale, double margin) {
  return std::make_shared<S3Hopf>(fiber_scale, margin);
}

std::shared_ptr<const Scenario> make_su2_s2(double radius, double margin) {
  return std::make_shared<Su2S2>(radius, margin);
}

std::shared_ptr<const Scenario> make_flat_t2(double orbit_length, bool full_torus) {
  return std::make_shared<FlatT2>(orbit_length, full_torus);
}

}  // namespace cheeger::scenarios
