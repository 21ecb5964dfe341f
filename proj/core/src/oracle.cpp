// Copyright 2026 The nessmpo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nessmpo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <boost/numeric/odeint.hpp>

namespace nessmpo::oracle {

namespace {

using Code = std::int64_t;

struct Term {
  Complex coeff;
  Code code;
};

Code pow4(int k) { return Code{1} << (2 * k); }

void check_size(int n) {
  if (n < 1 || n > kMaxSites) {
    throw std::invalid_argument("oracle: n = " + std::to_string(n) + " outside [1, " +
                                std::to_string(kMaxSites) + "]");
  }
}

// sigma^a sigma^b = phase sigma^c for full strings.
struct StringProduct {
  Complex phase;
  Code code;
};

StringProduct multiply(Code a, Code b, int n) {
  Complex phase{1.0, 0.0};
  Code c = 0;
  for (int i = 0; i < n; ++i) {
    const int ai = static_cast<int>((a >> (2 * i)) & 3);
    const int bi = static_cast<int>((b >> (2 * i)) & 3);
    const PauliProduct p = pauli_multiply(PauliIndex(ai), PauliIndex(bi));
    phase *= p.phase;
    c |= Code{p.index.value()} << (2 * i);
  }
  return {phase, c};
}

std::vector<Term> expand(const PlacedOperator& placed, int n) {
  const int k = placed.op.nsites();
  if (placed.first_site < 0 || placed.first_site + k > n) {
    throw std::invalid_argument("oracle: operator placed outside the chain");
  }
  const CVector c = operator_to_coeffs(placed.op);
  std::vector<Term> terms;
  for (int a = 0; a < c.size(); ++a) {
    if (std::abs(c(a)) == 0.0) continue;
    const Code local = k == 1 ? Code{a} : Code{a % 4} + 4 * Code{a / 4};
    terms.push_back({c(a), local << (2 * placed.first_site)});
  }
  return terms;
}

std::vector<Term> merge(const std::vector<Term>& terms) {
  std::map<Code, Complex> acc;
  for (const Term& t : terms) acc[t.code] += t.coeff;
  std::vector<Term> out;
  for (const auto& [code, coeff] : acc) {
    if (std::abs(coeff) > 0.0) out.push_back({coeff, code});
  }
  return out;
}

}  // namespace

DenseLiouvillean dense_liouvillean(int n, std::span<const PlacedOperator> hamiltonian,
                                   std::span<const PlacedOperator> jumps) {
  check_size(n);
  const Code dim = pow4(n);

  std::vector<Term> h_terms;
  for (const auto& p : hamiltonian) {
    if (!p.op.is_hermitian(1e-12 * std::max(1.0, p.op.matrix().cwiseAbs().maxCoeff()))) {
      throw std::invalid_argument("oracle: Hamiltonian term is not Hermitian");
    }
    const auto t = expand(p, n);
    h_terms.insert(h_terms.end(), t.begin(), t.end());
  }
  h_terms = merge(h_terms);

  struct Jump {
    std::vector<Term> l;
    std::vector<Term> ldl;  // L^dag L
    double rate;
  };
  std::vector<Jump> js;
  for (const auto& p : jumps) {
    Jump j;
    j.l = expand(p, n);
    j.rate = p.rate;
    std::vector<Term> prod;
    for (const Term& a : j.l) {
      for (const Term& b : j.l) {
        const auto m = multiply(a.code, b.code, n);
        prod.push_back({std::conj(a.coeff) * b.coeff * m.phase, m.code});
      }
    }
    j.ldl = merge(prod);
    js.push_back(std::move(j));
  }

  DenseLiouvillean out;
  out.n = n;
  out.matrix = RMatrix::Zero(dim, dim);
  CVector col(dim);
  const Complex minus_i{0.0, -1.0};
  for (Code b = 0; b < dim; ++b) {
    col.setZero();
    for (const Term& h : h_terms) {
      const auto left = multiply(h.code, b, n);
      const auto right = multiply(b, h.code, n);
      col(left.code) += minus_i * h.coeff * (left.phase - right.phase);
    }
    for (const Jump& j : js) {
      for (const Term& p : j.l) {
        const auto pb = multiply(p.code, b, n);
        for (const Term& q : j.l) {
          const auto pbq = multiply(pb.code, q.code, n);
          col(pbq.code) += 2.0 * j.rate * p.coeff * std::conj(q.coeff) * pb.phase * pbq.phase;
        }
      }
      for (const Term& r : j.ldl) {
        const auto rb = multiply(r.code, b, n);
        const auto br = multiply(b, r.code, n);
        col(rb.code) -= j.rate * r.coeff * (rb.phase + br.phase);
      }
    }
    if (col.imag().cwiseAbs().maxCoeff() > 1e-10) {
      throw std::runtime_error("oracle: generator has a non-real Pauli representation");
    }
    out.matrix.col(b) = col.real();
  }
  return out;
}

std::vector<PlacedOperator> bath_jump_operators(const ModelSpec& model, const BathSpec& bath) {
  bath.validate();
  std::vector<PlacedOperator> ops;
  if (bath.kind == BathKind::kSingleSpin) {
    for (const auto& l : single_spin_lindblad_operators(bath.mu_left)) ops.push_back({0, l, bath.gamma});
    for (const auto& l : single_spin_lindblad_operators(bath.mu_right)) ops.push_back({model.n - 1, l, bath.gamma});
  } else {
    if (model.n < 4) throw std::invalid_argument("two-spin baths need at least 4 sites");
    for (const auto& l : two_spin_lindblad_operators(two_spin_target(bath, model, ChainEnd::kLeft))) {
      ops.push_back({0, l, bath.gamma});
    }
    for (const auto& l : two_spin_lindblad_operators(two_spin_target(bath, model, ChainEnd::kRight))) {
      ops.push_back({model.n - 2, l, bath.gamma});
    }
  }
  return ops;
}

DenseLiouvillean dense_liouvillean(const ModelSpec& model, const std::optional<BathSpec>& bath) {
  model.validate();
  check_size(model.n);
  std::vector<PlacedOperator> h;
  const auto terms = build_bond_terms(model);
  for (std::size_t b = 0; b < terms.size(); ++b) h.push_back({static_cast<int>(b), terms[b]});
  std::vector<PlacedOperator> jumps;
  if (bath) jumps = bath_jump_operators(model, *bath);
  return dense_liouvillean(model.n, h, jumps);
}

NessResult ness_nullspace(const DenseLiouvillean& liou) {
  const Eigen::Index dim = liou.matrix.rows();
  NessResult out;
  out.coeffs = RVector::Zero(dim);
  out.coeffs(0) = 1.0;
  if (dim > 1) {
    const RMatrix block = liou.matrix.bottomRightCorner(dim - 1, dim - 1);
    Eigen::PartialPivLU<RMatrix> lu(block);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13)) {
      throw DegenerateNessError("oracle: steady state is not unique (rcond " + std::to_string(rcond) + ")");
    }
    out.coeffs.tail(dim - 1) = lu.solve(-liou.matrix.bottomLeftCorner(dim - 1, 1));
  }
  out.residual = (liou.matrix * out.coeffs).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(density_matrix(out.coeffs, liou.n), Eigen::EigenvaluesOnly);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  return out;
}

RVector time_integrate(const DenseLiouvillean& liou, const RVector& coeffs0, double t, const IntegrationControl& ctrl) {
  namespace ode = boost::numeric::odeint;
  if (coeffs0.size() != liou.matrix.cols()) throw std::invalid_argument("time_integrate: dimension mismatch");
  if (t < 0.0) throw std::invalid_argument("time_integrate: negative time");
  using State = std::vector<double>;
  State x(coeffs0.data(), coeffs0.data() + coeffs0.size());
  if (t == 0.0) return coeffs0;
  const RMatrix& m = liou.matrix;
  auto rhs = [&m](const State& in, State& out, double) {
    Eigen::Map<const RVector> v(in.data(), static_cast<Eigen::Index>(in.size()));
    Eigen::Map<RVector> dv(out.data(), static_cast<Eigen::Index>(out.size()));
    dv.noalias() = m * v;
  };
  try {
    ode::integrate_adaptive(ode::make_controlled(ctrl.abs_tol, ctrl.rel_tol, ode::runge_kutta_dopri5<State>()), rhs,
                            x, 0.0, t, std::min(ctrl.dt_initial, t));
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("time_integrate: step-size underflow: ") + e.what());
  }
  return Eigen::Map<const RVector>(x.data(), static_cast<Eigen::Index>(x.size()));
}

CVector liouvillean_spectrum(const DenseLiouvillean& liou) {
  if (liou.n > 5) throw std::invalid_argument("liouvillean_spectrum: n must be <= 5");
  Eigen::EigenSolver<RMatrix> es(liou.matrix, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("liouvillean_spectrum: eigensolver failed");
  return es.eigenvalues();
}

RVector product_coeffs(std::span<const Eigen::Vector4d> local) {
  const int n = static_cast<int>(local.size());
  check_size(n);
  RVector c = RVector::Ones(1);
  for (int i = n - 1; i >= 0; --i) {
    RVector next(c.size() * 4);
    for (Eigen::Index hi = 0; hi < c.size(); ++hi) {
      for (int s = 0; s < 4; ++s) next(hi * 4 + s) = c(hi) * local[static_cast<std::size_t>(i)](s);
    }
    c = std::move(next);
  }
  return c;
}

CMatrix density_matrix(const RVector& coeffs, int n) {
  check_size(n);
  if (coeffs.size() != pow4(n)) throw std::invalid_argument("density_matrix: wrong coefficient count");
  const Code dim = Code{1} << n;
  CMatrix rho = CMatrix::Zero(dim, dim);
  const Complex i1{0.0, 1.0};
  for (Code s = 0; s < coeffs.size(); ++s) {
    if (coeffs(s) == 0.0) continue;
    for (Code x = 0; x < dim; ++x) {
      Code y = x;
      Complex ph{1.0, 0.0};
      for (int site = 0; site < n; ++site) {
        const int p = static_cast<int>((s >> (2 * site)) & 3);
        const bool down = (x >> site) & 1;
        if (p == 1) {
          y ^= Code{1} << site;
        } else if (p == 2) {
          y ^= Code{1} << site;
          ph *= down ? -i1 : i1;
        } else if (p == 3 && down) {
          ph = -ph;
        }
      }
      rho(y, x) += coeffs(s) * ph;
    }
  }
  return rho / (coeffs(0) * static_cast<double>(dim));
}

double expect(const RVector& coeffs, std::span<const int> string) {
  Code code = 0;
  for (std::size_t i = 0; i < string.size(); ++i) {
    if (string[i] < 0 || string[i] > 3) throw std::invalid_argument("expect: bad Pauli index");
    code |= Code{string[i]} << (2 * i);
  }
  if (code >= coeffs.size()) throw std::invalid_argument("expect: string longer than the chain");
  return coeffs(code) / coeffs(0);
}

std::vector<double> spin_profile(const RVector& coeffs, int n) {
  std::vector<double> s;
  for (int l = 0; l < n; ++l) s.push_back(coeffs(3 * pow4(l)) / coeffs(0));
  return s;
}

std::vector<double> spin_current_profile(const RVector& coeffs, int n) {
  std::vector<double> j;
  for (int l = 0; l + 1 < n; ++l) {
    j.push_back((coeffs(1 * pow4(l) + 2 * pow4(l + 1)) - coeffs(2 * pow4(l) + 1 * pow4(l + 1))) / coeffs(0));
  }
  return j;
}

std::vector<double> energy_density_profile(const RVector& coeffs, int n, std::span<const LocalOperator> bond_terms) {
  if (static_cast<int>(bond_terms.size()) != n - 1) throw std::invalid_argument("energy_density_profile: bad terms");
  std::vector<double> e;
  for (int l = 0; l + 1 < n; ++l) {
    const CVector h = operator_to_coeffs(bond_terms[static_cast<std::size_t>(l)]);
    double v = 0.0;
    for (int a = 0; a < 16; ++a) v += h(a).real() * coeffs((a % 4) * pow4(l) + (a / 4) * pow4(l + 1));
    e.push_back(v / coeffs(0));
  }
  return e;
}

std::vector<double> energy_current_profile(const RVector& coeffs, int n, double hx) {
  std::vector<double> j;
  for (int l = 1; l + 1 < n; ++l) {
    const double zy = coeffs(3 * pow4(l - 1) + 2 * pow4(l));
    const double yz = coeffs(2 * pow4(l) + 3 * pow4(l + 1));
    j.push_back(2.0 * hx * (zy - yz) / coeffs(0));
  }
  return j;
}

std::vector<double> schmidt_values(const RVector& coeffs, int n, int cut) {
  if (cut < 0 || cut >= n - 1) throw std::invalid_argument("schmidt_values: bad cut");
  const Code rows = pow4(cut + 1);
  Eigen::Map<const RMatrix> m(coeffs.data(), rows, coeffs.size() / rows);
  Eigen::BDCSVD<RMatrix> svd(m);
  RVector s = svd.singularValues();
  s /= s.norm();
  return {s.data(), s.data() + s.size()};
}

}  // namespace nessmpo::oracle
