#include "wigfluct/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <stdexcept>

namespace wigfluct::quad {
namespace {

template <int N>
Rule build_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();  // nonnegative half, ascending, x[0] = 0 for odd N
  const auto& w = G::weights();
  Rule r;
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    r.nodes.push_back(-x[i]);
    r.weights.push_back(w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.nodes.push_back(x[i]);
    r.weights.push_back(w[i]);
  }
  return r;
}

}  // namespace

const Rule& gauss_legendre(int order) {
  static const Rule r7 = build_rule<7>();
  static const Rule r10 = build_rule<10>();
  static const Rule r15 = build_rule<15>();
  static const Rule r20 = build_rule<20>();
  static const Rule r25 = build_rule<25>();
  static const Rule r30 = build_rule<30>();
  switch (order) {
    case 7: return r7;
    case 10: return r10;
    case 15: return r15;
    case 20: return r20;
    case 25: return r25;
    case 30: return r30;
    default: throw std::invalid_argument("gauss_legendre: unsupported order");
  }
}

const GaussKronrod15& gauss_kronrod15() {
  static const GaussKronrod15 table = [] {
    using K = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    GaussKronrod15 t{};
    for (std::size_t i = 0; i < 8; ++i) {
      t.kronrod_nodes[i] = K::abscissa()[i];
      t.kronrod_weights[i] = K::weights()[i];
    }
    for (std::size_t i = 0; i < 4; ++i) t.gauss_weights[i] = G::weights()[i];
    return t;
  }();
  return table;
}

}  // namespace wigfluct::quad
