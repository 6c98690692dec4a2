#include "twoel/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include <omp.h>

#include "twoel/dense_lu.hpp"
#include "twoel/pipeline.hpp"

namespace twoel {

namespace {

std::vector<double> multiplyB(const SparsePencil& p, const std::vector<double>& x) {
  std::vector<double> y(p.dim, 0.0);
  for (const auto& e : p.entries)
    if (e.b != 0) y[e.row] += static_cast<double>(e.b) * x[e.col];
  return y;
}

double norm2(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

void normalizeDirection(std::vector<double>& x) {
  const double nrm = norm2(x);
  if (nrm == 0 || !std::isfinite(nrm)) throw IterationError("inverse iteration lost the vector");
  double biggest = 0;
  for (double v : x) biggest = std::max(biggest, std::abs(v));
  double sign = 1;
  for (double v : x)
    if (std::abs(v) > 1e-12 * biggest) {
      sign = v < 0 ? -1 : 1;
      break;
    }
  for (double& v : x) v *= sign / nrm;
}

}  // namespace

DetSign logDetSign(const SparsePencil& pencil, double eps) {
  if (pencil.dim == 0) throw DomainError("determinant of an empty pencil");
  LuFactors f = luFactor(pencil.dense(eps), pencil.dim);
  return {f.sign, f.logAbsDet};
}

RootResult findLargestRoot(const SparsePencil& pencil, const RootOptions& options) {
  const double hi0 = options.epsHi.value_or(pencil.charge + 1.0);
  const double step = options.scanStep.value_or(0.01 * pencil.charge);
  if (!(step > 0)) throw DomainError("scan step must be positive");
  if (!(options.tol > 0)) throw DomainError("tolerance must be positive");

  RootResult result;
  auto finishExact = [&](double eps) {
    result.epsilon = result.bracketLo = result.bracketHi = eps;
    return result;
  };

  ScanSample prev{hi0, logDetSign(pencil, hi0)};
  result.trace.push_back(prev);
  result.evaluations = 1;
  if (prev.det.sign == 0) return finishExact(hi0);

  // Scan points are independent; evaluate them a batch at a time.
  const int batch = std::max(1, omp_get_max_threads()) * 4;
  std::optional<std::size_t> hit;
  for (long k0 = 1; !hit; k0 += batch) {
    std::vector<ScanSample> samples;
    for (long k = k0; k < k0 + batch; ++k) {
      const double eps = hi0 - static_cast<double>(k) * step;
      if (eps <= 0) break;
      samples.push_back({eps, {}});
    }
    if (samples.empty()) break;
    const long count = static_cast<long>(samples.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) samples[i].det = logDetSign(pencil, samples[i].eps);
    result.evaluations += static_cast<int>(count);
    for (const auto& s : samples) {
      result.trace.push_back(s);
      const ScanSample& before = result.trace[result.trace.size() - 2];
      if (s.det.sign == 0 || s.det.sign != before.det.sign) {
        hit = result.trace.size() - 1;
        break;
      }
    }
  }

  // logAbsDet dips without a sign change may hide even-multiplicity roots.
  const std::size_t scanned = hit ? *hit : result.trace.size();
  for (std::size_t i = 1; i + 1 < scanned; ++i) {
    const double l = result.trace[i].det.logAbsDet;
    if (l < result.trace[i - 1].det.logAbsDet - 2.0 && l < result.trace[i + 1].det.logAbsDet - 2.0) {
      std::ostringstream os;
      os << "logAbsDet dip without sign change near eps = " << result.trace[i].eps
         << " (possible even-multiplicity root)";
      result.warnings.push_back(os.str());
    }
  }

  if (!hit) {
    std::ostringstream os;
    os << "no sign change of det(A - eps B) in (0, " << hi0 << "] with step " << step
       << "; scanned " << result.trace.size() << " points, logAbsDet from "
       << result.trace.front().det.logAbsDet << " to " << result.trace.back().det.logAbsDet;
    throw NoRootError(os.str());
  }

  ScanSample lo = result.trace[*hit];
  ScanSample hi = result.trace[*hit - 1];
  if (lo.det.sign == 0) return finishExact(lo.eps);

  while (hi.eps - lo.eps > options.tol) {
    const double mid = 0.5 * (lo.eps + hi.eps);
    if (mid <= lo.eps || mid >= hi.eps) break;
    ScanSample s{mid, logDetSign(pencil, mid)};
    ++result.evaluations;
    ++result.bisections;
    if (s.det.sign == 0) return finishExact(mid);
    (s.det.sign == hi.det.sign ? hi : lo) = s;
  }

  result.bracketLo = lo.eps;
  result.bracketHi = hi.eps;
  const double ref = std::max(lo.det.logAbsDet, hi.det.logAbsDet);
  const double fLo = lo.det.sign * std::exp(lo.det.logAbsDet - ref);
  const double fHi = hi.det.sign * std::exp(hi.det.logAbsDet - ref);
  double x = 0.5 * (lo.eps + hi.eps);
  if (fHi != fLo) {
    const double secant = hi.eps - fHi * (hi.eps - lo.eps) / (fHi - fLo);
    if (secant >= lo.eps && secant <= hi.eps) x = secant;
  }
  result.epsilon = x;
  return result;
}

double pencilResidual(const SparsePencil& pencil, double eps, const std::vector<double>& v) {
  std::vector<double> r(pencil.dim, 0.0);
  for (const auto& e : pencil.entries)
    r[e.row] += (static_cast<double>(e.a) - eps * static_cast<double>(e.b)) * v[e.col];
  return norm2(r) / norm2(v);
}

double rayleighQuotient(const SparsePencil& pencil, const std::vector<double>& v) {
  double num = 0, den = 0;
  for (const auto& e : pencil.entries) {
    num += v[e.row] * static_cast<double>(e.a) * v[e.col];
    den += v[e.row] * static_cast<double>(e.b) * v[e.col];
  }
  return num / den;
}

IterationResult inverseIteration(const SparsePencil& pencil, double epsStar,
                                 const IterationOptions& options) {
  if (pencil.dim == 0) throw DomainError("inverse iteration on an empty pencil");
  double offset = options.shift * std::max(1.0, std::abs(epsStar));
  LuFactors f;
  for (int attempt = 0;; ++attempt) {
    f = luFactor(pencil.dense(epsStar + offset), pencil.dim);
    if (f.sign != 0) break;
    if (attempt == 8) throw IterationError("shifted pencil stays exactly singular");
    offset *= 10;
  }

  IterationResult out;
  std::vector<double> x(pencil.dim);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 + 1e-3 * static_cast<double>(i % 7);
  normalizeDirection(x);

  int settled = 0;
  for (int it = 1; it <= options.maxIter; ++it) {
    std::vector<double> y = multiplyB(pencil, x);
    luSolve(f, y);
    normalizeDirection(y);
    double diff = 0;
    for (std::size_t i = 0; i < y.size(); ++i) diff += (y[i] - x[i]) * (y[i] - x[i]);
    x = std::move(y);
    out.iterations = it;
    settled = std::sqrt(diff) < options.tol ? settled + 1 : 0;
    if (settled >= 2) {
      out.vector = std::move(x);
      out.residual = pencilResidual(pencil, epsStar, out.vector);
      return out;
    }
  }
  throw IterationError("inverse iteration did not converge in " + std::to_string(options.maxIter) +
                       " steps (multiple or clustered root?)");
}

// ---------------------------------------------------------------------------

namespace {

std::mutex cacheMutex;
std::map<bool, Recurrence>& recurrenceCache() {
  static std::map<bool, Recurrence> cache;
  return cache;
}

}  // namespace

const Recurrence& cachedRecurrence(bool interaction) {
  std::lock_guard lock(cacheMutex);
  auto& cache = recurrenceCache();
  auto it = cache.find(interaction);
  if (it == cache.end()) {
    const DiffOp op = perimetricOperator({interaction});
    it = cache.emplace(interaction, interaction ? validatedRecurrence(op) : transferRecurrence(op))
             .first;
  }
  return it->second;
}

void primeRecurrenceCache(bool interaction, Recurrence rec) {
  std::lock_guard lock(cacheMutex);
  recurrenceCache().insert_or_assign(interaction, std::move(rec));
}

EigenResult groundStateFromPencil(const SparsePencil& pencil, const GroundStateOptions& options) {
  const RootResult root = findLargestRoot(pencil, options.root);
  const IterationResult vec = inverseIteration(pencil, root.epsilon, options.iteration);

  EigenResult r;
  r.Z = pencil.charge;
  r.omega = pencil.basis.omega();
  r.symClass = pencil.basis.symClass();
  r.interaction = options.interaction;
  r.dim = pencil.dim;
  r.epsilon = root.epsilon;
  r.energy = -root.epsilon * root.epsilon;
  r.residual = vec.residual;
  r.rootEvaluations = root.evaluations;
  r.iterations = vec.iterations;
  r.vector = vec.vector;
  r.triples = pencil.basis.triples();
  r.warnings = root.warnings;
  return r;
}

EigenResult groundState(int Z, int omega, SymClass cls, const GroundStateOptions& options) {
  if (Z < 1) throw DomainError("nuclear charge must be >= 1");
  if (omega < 0) throw DomainError("omega must be >= 0");
  const Recurrence& rec = cachedRecurrence(options.interaction);
  const SparsePencil pencil = assemblePencil(rec.op, enumerateBasis(omega, cls), Z);
  return groundStateFromPencil(pencil, options);
}

double evaluateWavefunction(const EigenResult& result, double r1, double r2, double r12) {
  if (!(r1 > 0 && r2 > 0 && r12 > 0))
    throw DomainError("interparticle distances must be positive");
  const double slack = 1e-12 * (r1 + r2 + r12);
  if (r1 > r2 + r12 + slack || r2 > r1 + r12 + slack || r12 > r1 + r2 + slack)
    throw DomainError("distances violate the triangle inequality");

  const double eps = result.epsilon;
  const double u = std::max(0.0, eps * (r2 + r12 - r1));
  const double v = std::max(0.0, eps * (r1 + r12 - r2));
  const double w = std::max(0.0, 2.0 * eps * (r1 + r2 - r12));
  const auto Lu = laguerreValues(result.omega, u);
  const auto Lv = laguerreValues(result.omega, v);
  const auto Lw = laguerreValues(result.omega, w);

  const double parity = result.symClass == SymClass::para ? 1.0 : -1.0;
  double sum = 0;
  for (std::size_t i = 0; i < result.triples.size(); ++i) {
    const auto& [l, m, n] = result.triples[i];
    double pair = Lu[l] * Lv[m];
    if (l != m) pair += parity * Lu[m] * Lv[l];
    sum += result.vector[i] * pair * Lw[n];
  }
  return std::exp(-0.5 * (u + v + w)) * sum;
}

nlohmann::json toJson(const EigenResult& r, bool includeVector) {
  nlohmann::json j = {{"Z", r.Z},
                      {"omega", r.omega},
                      {"symClass", std::string(symClassName(r.symClass))},
                      {"interaction", r.interaction},
                      {"dim", r.dim},
                      {"epsilon", r.epsilon},
                      {"energy", r.energy},
                      {"residual", r.residual},
                      {"rootEvaluations", r.rootEvaluations},
                      {"iterations", r.iterations},
                      {"warnings", r.warnings}};
  if (includeVector) {
    nlohmann::json vec = nlohmann::json::array();
    for (std::size_t i = 0; i < r.vector.size(); ++i)
      vec.push_back({{"triple", {r.triples[i][0], r.triples[i][1], r.triples[i][2]}},
                     {"value", r.vector[i]}});
    j["vector"] = std::move(vec);
  }
  return j;
}

}  // namespace twoel
