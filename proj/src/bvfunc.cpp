#include "wigfluct/bvfunc.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/math/tools/roots.hpp>

namespace wigfluct {
namespace {

constexpr int kScanPoints = 256;

// Sign changes of h on [a, b], located by bracketing on a uniform grid.
std::vector<double> sign_changes(const std::function<double(double)>& h, double a, double b) {
  std::vector<double> roots;
  const double step = (b - a) / kScanPoints;
  double x0 = a, h0 = h(a);
  for (int k = 1; k <= kScanPoints; ++k) {
    const double x1 = k == kScanPoints ? b : a + k * step;
    const double h1 = h(x1);
    if (h0 == 0.0 && k > 1) {
      roots.push_back(x0);
    } else if (h0 * h1 < 0.0) {
      boost::math::tools::eps_tolerance<double> tol(52);
      boost::uintmax_t iters = 200;
      const auto r = boost::math::tools::bisect(h, x0, x1, tol, iters);
      roots.push_back(0.5 * (r.first + r.second));
    }
    x0 = x1;
    h0 = h1;
  }
  return roots;
}

std::vector<double> with_endpoints(double a, double b, std::vector<double> inner) {
  std::vector<double> out{a};
  for (double r : inner)
    if (r > out.back() && r < b) out.push_back(r);
  out.push_back(b);
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Piece Piece::constant_value(double c) {
  return Piece{[c](double) { return c; }, [](double) { return 0.0; }, true};
}

Piece Piece::polynomial(std::vector<double> coeffs, double origin) {
  std::vector<double> dcoeffs;
  for (std::size_t k = 1; k < coeffs.size(); ++k) dcoeffs.push_back(static_cast<double>(k) * coeffs[k]);
  auto horner = [](const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
  };
  const bool constant = coeffs.size() <= 1;
  return Piece{[=](double x) { return horner(coeffs, x - origin); },
               [=](double x) { return horner(dcoeffs, x - origin); }, constant};
}

BVFunction::BVFunction(std::string name, std::vector<double> breakpoints, std::vector<Piece> pieces, bool lipschitz,
                       double support)
    : name_(std::move(name)),
      breakpoints_(std::move(breakpoints)),
      pieces_(std::move(pieces)),
      lipschitz_(lipschitz),
      support_(support) {
  if (breakpoints_.empty() && pieces_.empty()) return;
  if (breakpoints_.size() != pieces_.size() + 1)
    throw std::invalid_argument("BVFunction '" + name_ + "': need one more breakpoint than pieces");
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
    if (!(breakpoints_[i] < breakpoints_[i + 1]))
      throw std::invalid_argument("BVFunction '" + name_ + "': breakpoints must increase strictly");
  if (breakpoints_.front() < -support_ || breakpoints_.back() > support_)
    throw std::invalid_argument("BVFunction '" + name_ + "': breakpoints outside [-L, L]");

  const std::size_t nb = breakpoints_.size();
  for (std::size_t i = 0; i < nb; ++i) {
    const double x = breakpoints_[i];
    const double left = i == 0 ? 0.0 : pieces_[i - 1].value(x);
    const double right = i + 1 == nb ? 0.0 : pieces_[i].value(x);
    const double scale = std::max({1.0, std::abs(left), std::abs(right)});
    if (std::abs(right - left) > 1e-12 * scale) jumps_.push_back({x, right - left});
  }
  if (!jumps_.empty()) lipschitz_ = false;

  monotone_splits_.reserve(pieces_.size());
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double a = breakpoints_[i], b = breakpoints_[i + 1];
    if (pieces_[i].constant)
      monotone_splits_.push_back({a, b});
    else
      monotone_splits_.push_back(with_endpoints(a, b, sign_changes(pieces_[i].derivative, a, b)));
  }
}

std::size_t BVFunction::piece_index(double x) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double BVFunction::operator()(double x) const {
  if (breakpoints_.empty() || x < breakpoints_.front() || x >= breakpoints_.back()) return 0.0;
  return pieces_[piece_index(x)].value(x);
}

double BVFunction::derivative(double x) const {
  if (breakpoints_.empty() || x < breakpoints_.front() || x >= breakpoints_.back()) return 0.0;
  return pieces_[piece_index(x)].derivative(x);
}

BVNorms BVFunction::norms() const {
  BVNorms out;
  for (const auto& j : jumps_) out.total_variation += std::abs(j.size);
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& v = pieces_[i].value;
    const auto& cuts = monotone_splits_[i];
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) out.total_variation += std::abs(v(cuts[k + 1]) - v(cuts[k]));
    const double a = breakpoints_[i], b = breakpoints_[i + 1];
    const auto zeros = pieces_[i].constant ? std::vector<double>{a, b} : with_endpoints(a, b, sign_changes(v, a, b));
    for (std::size_t k = 0; k + 1 < zeros.size(); ++k) {
      auto est = quad::integrate_adaptive<double>([&](double x) { return std::abs(v(x)); }, zeros[k], zeros[k + 1],
                                                  {1e-13, 1e-13, 2000});
      out.l1 += est.value;
    }
  }
  return out;
}

double BVFunction::integrate(const std::function<double(double)>& w, const quad::AdaptiveOptions& opt) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& v = pieces_[i].value;
    const auto& cuts = monotone_splits_[i];
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
      sum += quad::integrate_adaptive<double>([&](double x) { return v(x) * w(x); }, cuts[k], cuts[k + 1], opt).value;
  }
  return sum;
}

BVFunction BVFunction::scaled(double alpha) const {
  std::vector<Piece> pieces;
  pieces.reserve(pieces_.size());
  for (const auto& p : pieces_) {
    auto v = p.value;
    auto d = p.derivative;
    pieces.push_back(Piece{[v, alpha](double x) { return alpha * v(x); },
                           [d, alpha](double x) { return alpha * d(x); }, p.constant});
  }
  return BVFunction(num(alpha) + "*" + name_, breakpoints_, std::move(pieces), lipschitz_, support_);
}

BVFunction operator+(const BVFunction& f, const BVFunction& g) {
  std::set<double> merged(f.breakpoints_.begin(), f.breakpoints_.end());
  merged.insert(g.breakpoints_.begin(), g.breakpoints_.end());
  std::vector<double> bps(merged.begin(), merged.end());
  auto pick = [](const BVFunction& h, double mid) -> const Piece* {
    if (h.breakpoints_.empty() || mid < h.breakpoints_.front() || mid >= h.breakpoints_.back()) return nullptr;
    return &h.pieces_[h.piece_index(mid)];
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const double mid = 0.5 * (bps[i] + bps[i + 1]);
    const Piece* p = pick(f, mid);
    const Piece* q = pick(g, mid);
    Piece a = p ? *p : Piece::constant_value(0.0);
    Piece b = q ? *q : Piece::constant_value(0.0);
    pieces.push_back(Piece{[av = a.value, bv = b.value](double x) { return av(x) + bv(x); },
                           [ad = a.derivative, bd = b.derivative](double x) { return ad(x) + bd(x); },
                           a.constant && b.constant});
  }
  return BVFunction(f.name_ + "+" + g.name_, std::move(bps), std::move(pieces), f.lipschitz_ && g.lipschitz_,
                    std::max(f.support_, g.support_));
}

double cutoff(double x, double flat, double support) {
  const double ax = std::abs(x);
  if (ax <= flat) return 1.0;
  if (ax >= support) return 0.0;
  const double t = (support - ax) / (support - flat);
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double cutoff_derivative(double x, double flat, double support) {
  const double ax = std::abs(x);
  if (ax <= flat || ax >= support) return 0.0;
  const double t = (support - ax) / (support - flat);
  const double ds = 30.0 * t * t * (1.0 - t) * (1.0 - t);
  return -std::copysign(1.0, x) * ds / (support - flat);
}

namespace bv {
namespace {

constexpr double kSupport = 3.0;

// f(x) * cutoff(x) on [-L, -flat] and [flat, L]; `inner` in between.
BVFunction cut(std::string name, std::function<double(double)> v, std::function<double(double)> d,
               std::vector<double> extra, double flat, bool lipschitz) {
  if (!(flat > 0.0 && flat < kSupport)) throw std::invalid_argument("cutoff flat radius must lie in (0, 3)");
  auto cv = [v, flat](double x) { return v(x) * cutoff(x, flat, kSupport); };
  auto cd = [v, d, flat](double x) {
    return d(x) * cutoff(x, flat, kSupport) + v(x) * cutoff_derivative(x, flat, kSupport);
  };
  std::set<double> bps{-kSupport, -flat, flat, kSupport};
  for (double e : extra)
    if (e > -kSupport && e < kSupport) bps.insert(e);
  std::vector<double> b(bps.begin(), bps.end());
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    const double mid = 0.5 * (b[i] + b[i + 1]);
    if (std::abs(mid) < flat)
      pieces.push_back(Piece{v, d, false});
    else
      pieces.push_back(Piece{cv, cd, false});
  }
  return BVFunction(std::move(name), std::move(b), std::move(pieces), lipschitz, kSupport);
}

}  // namespace

BVFunction indicator(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("indicator: need a < b");
  return BVFunction("indicator(" + num(a) + "," + num(b) + ")", {a, b}, {Piece::constant_value(1.0)}, false,
                    kSupport);
}

BVFunction abs_shift(double a, double flat) {
  return cut("abs(" + num(a) + ")", [a](double x) { return std::abs(x - a); },
             [a](double x) { return x > a ? 1.0 : (x < a ? -1.0 : 0.0); }, {a}, flat, true);
}

BVFunction monomial(int k, double flat) {
  if (k < 0) throw std::invalid_argument("monomial: negative degree");
  const std::string name = k == 0 ? "one" : (k == 1 ? "x" : "x^" + std::to_string(k));
  std::vector<double> coeffs(static_cast<std::size_t>(k) + 1, 0.0);
  coeffs.back() = 1.0;
  Piece p = Piece::polynomial(coeffs);
  return cut(name, p.value, p.derivative, {}, flat, true);
}

BVFunction bump(double center, double radius) {
  if (!(radius > 0.0) || center - radius < -kSupport || center + radius > kSupport)
    throw std::invalid_argument("bump: support must lie in [-3, 3]");
  auto v = [center, radius](double x) {
    const double t = (x - center) / radius;
    const double q = 1.0 - t * t;
    return q > 0.0 ? std::exp(1.0 - 1.0 / q) : 0.0;
  };
  auto d = [center, radius, v](double x) {
    const double t = (x - center) / radius;
    const double q = 1.0 - t * t;
    return q > 0.0 ? v(x) * (-2.0 * t / (q * q)) / radius : 0.0;
  };
  return BVFunction("bump", {center - radius, center + radius}, {Piece{v, d, false}}, true, kSupport);
}

BVFunction ramp(double a, double b, double flat) {
  if (!(a < b) || a <= -kSupport || b > flat) throw std::invalid_argument("ramp: need -3 < a < b <= flat");
  std::vector<double> bps{a, b};
  std::vector<Piece> pieces{Piece::polynomial({0.0, 1.0 / (b - a)}, a)};
  if (b < flat) {
    bps.push_back(flat);
    pieces.push_back(Piece::constant_value(1.0));
  }
  bps.push_back(kSupport);
  pieces.push_back(Piece{[flat](double x) { return cutoff(x, flat, kSupport); },
                         [flat](double x) { return cutoff_derivative(x, flat, kSupport); }, false});
  return BVFunction("ramp(" + num(a) + "," + num(b) + ")", std::move(bps), std::move(pieces), true, kSupport);
}

BVFunction zero() { return BVFunction("zero", {}, {}, true, kSupport); }

BVFunction make(const std::string& kind, const std::map<std::string, double>& params) {
  std::set<std::string> used;
  auto get = [&](const std::string& key, double fallback) {
    used.insert(key);
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  auto require = [&](const std::string& key) {
    used.insert(key);
    const auto it = params.find(key);
    if (it == params.end()) throw std::invalid_argument("function '" + kind + "' needs parameter '" + key + "'");
    return it->second;
  };
  BVFunction f;
  if (kind == "indicator")
    f = indicator(require("a"), require("b"));
  else if (kind == "abs")
    f = abs_shift(get("a", 0.0), get("flat", 2.5));
  else if (kind == "monomial")
    f = monomial(static_cast<int>(require("k")), get("flat", 2.5));
  else if (kind == "bump")
    f = bump(get("center", 0.0), get("radius", 1.0));
  else if (kind == "ramp")
    f = ramp(get("a", -1.0), get("b", 1.0), get("flat", 2.5));
  else if (kind == "zero")
    f = zero();
  else
    throw std::invalid_argument("unknown function kind '" + kind + "'");
  for (const auto& [key, value] : params)
    if (!used.count(key)) throw std::invalid_argument("function '" + kind + "' has no parameter '" + key + "'");
  return f;
}

}  // namespace bv

std::vector<BVFunction> builtin_library() {
  return {bv::indicator(-1.0, 1.0), bv::indicator(-2.0, 0.0), bv::abs_shift(0.0), bv::monomial(1),
          bv::monomial(2),          bv::monomial(3),          bv::bump(),         bv::ramp()};
}

}  // namespace wigfluct
