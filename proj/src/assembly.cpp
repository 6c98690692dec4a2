#include "twoel/assembly.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace twoel {

namespace {

std::int64_t narrow(__int128 x) {
  if (x > std::numeric_limits<std::int64_t>::max() || x < std::numeric_limits<std::int64_t>::min())
    throw StructureError("pencil entry exceeds 64-bit range");
  return static_cast<std::int64_t>(x);
}

std::vector<PencilEntry> assembleRow(const CompiledRecurrence& rec, const Basis& basis, int Z,
                                     std::size_t row) {
  const Triple& t = basis.triple(row);
  std::vector<std::pair<int, CompiledRecurrence::Linear>> acc;
  for (const auto& term : rec.terms()) {
    Triple target{t[0] + term.shift[0], t[1] + term.shift[1], t[2] + term.shift[2]};
    auto folded = fold(target, basis.symClass(), basis.omega());
    if (!folded) continue;
    const int col = basis.indexOf(folded->triple);
    const auto lin = rec.evaluate(term, t, Z);
    auto it = std::find_if(acc.begin(), acc.end(), [&](const auto& e) { return e.first == col; });
    if (it == acc.end()) {
      acc.push_back({col, {}});
      it = acc.end() - 1;
    }
    it->second.c0 += folded->sign * lin.c0;
    it->second.c1 += folded->sign * lin.c1;
  }
  std::sort(acc.begin(), acc.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<PencilEntry> out;
  for (const auto& [col, lin] : acc) {
    if (lin.c0 == 0 && lin.c1 == 0) continue;
    // M = A - eps*B
    out.push_back({static_cast<std::int32_t>(row), col, narrow(lin.c0), narrow(-lin.c1)});
  }
  return out;
}

SparsePencil emptyPencil(const Basis& basis, int Z) {
  if (Z < 1) throw DomainError("nuclear charge must be a positive integer");
  SparsePencil p;
  p.dim = basis.size();
  p.charge = Z;
  p.basis = basis;
  return p;
}

}  // namespace

std::string_view symClassName(SymClass c) { return c == SymClass::para ? "para" : "ortho"; }

SymClass symClassFromName(std::string_view name) {
  if (name == "para") return SymClass::para;
  if (name == "ortho") return SymClass::ortho;
  throw DomainError("unknown symmetry class '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

Basis::Basis(int omega, SymClass cls) : omega_(omega), cls_(cls) {
  if (omega < 0) throw DomainError("omega must be non-negative");
  for (int s = 0; s <= omega; ++s)
    for (int l = 0; l <= s; ++l)
      for (int m = (cls == SymClass::para ? l : l + 1); l + m <= s; ++m)
        triples_.push_back({l, m, s - l - m});
  rebuildIndex();
}

void Basis::rebuildIndex() {
  const std::size_t side = static_cast<std::size_t>(omega_) + 1;
  lookup_.assign(side * side * side, -1);
  for (std::size_t i = 0; i < triples_.size(); ++i) {
    const Triple& t = triples_[i];
    lookup_[(static_cast<std::size_t>(t[0]) * side + t[1]) * side + t[2]] = static_cast<int>(i);
  }
}

int Basis::indexOf(const Triple& t) const {
  if (t[0] < 0 || t[1] < 0 || t[2] < 0 || t[0] + t[1] + t[2] > omega_) return -1;
  const std::size_t side = static_cast<std::size_t>(omega_) + 1;
  return lookup_[(static_cast<std::size_t>(t[0]) * side + t[1]) * side + t[2]];
}

Basis Basis::permuted(const std::vector<std::size_t>& perm) const {
  if (perm.size() != triples_.size()) throw DomainError("permutation size mismatch");
  Basis b = *this;
  for (std::size_t i = 0; i < perm.size(); ++i) b.triples_[i] = triples_.at(perm[i]);
  b.rebuildIndex();
  return b;
}

Basis enumerateBasis(int omega, SymClass cls) { return Basis(omega, cls); }

std::size_t basisDimension(int omega, SymClass cls) {
  if (omega < 0) throw DomainError("omega must be non-negative");
  const std::size_t w = static_cast<std::size_t>(omega);
  const std::size_t total = (w + 1) * (w + 2) * (w + 3) / 6;
  std::size_t diagonal = 0;
  for (std::size_t l = 0; 2 * l <= w; ++l) diagonal += w - 2 * l + 1;
  return cls == SymClass::para ? (total + diagonal) / 2 : (total - diagonal) / 2;
}

std::optional<Folded> fold(const Triple& t, SymClass cls, int omega) {
  if (t[0] < 0 || t[1] < 0 || t[2] < 0) return std::nullopt;
  if (t[0] + t[1] + t[2] > omega) return std::nullopt;
  if (t[0] == t[1]) {
    if (cls == SymClass::ortho) return std::nullopt;
    return Folded{t, 1};
  }
  if (t[0] > t[1]) return Folded{{t[1], t[0], t[2]}, cls == SymClass::para ? 1 : -1};
  return Folded{t, 1};
}

// ---------------------------------------------------------------------------

CompiledRecurrence::CompiledRecurrence(const SeqOp& op) {
  for (const auto& [s, c] : op.stencil()) {
    Term term;
    term.shift = s;
    for (const auto& [e, q] : c.terms()) {
      if (q.get_den() != 1 || !q.get_num().fits_slong_p())
        throw StructureError("recurrence coefficients must be normalized 64-bit integers");
      const int epsDeg = exponentOf(e, Var::eps);
      if (epsDeg > 1) throw StructureError("recurrence coefficient with deg_eps > 1");
      std::array<int, 4> ex{exponentOf(e, Var::l), exponentOf(e, Var::m), exponentOf(e, Var::n),
                            exponentOf(e, Var::Z)};
      (epsDeg == 0 ? term.eps0 : term.eps1).push_back({ex, q.get_num().get_si()});
    }
    terms_.push_back(std::move(term));
  }
}

CompiledRecurrence::Linear CompiledRecurrence::evaluate(const Term& term, const Triple& t,
                                                        int Z) const {
  auto eval = [&](const auto& monos) {
    __int128 sum = 0;
    for (const auto& [ex, c] : monos) {
      __int128 v = c;
      for (int k = 0; k < ex[0]; ++k) v *= t[0];
      for (int k = 0; k < ex[1]; ++k) v *= t[1];
      for (int k = 0; k < ex[2]; ++k) v *= t[2];
      for (int k = 0; k < ex[3]; ++k) v *= Z;
      sum += v;
    }
    return sum;
  };
  return {eval(term.eps0), eval(term.eps1)};
}

SparsePencil assemblePencil(const SeqOp& rec, const Basis& basis, int Z) {
  SparsePencil p = emptyPencil(basis, Z);
  const CompiledRecurrence compiled(rec);
  std::vector<std::vector<PencilEntry>> rows(basis.size());
  const long n = static_cast<long>(basis.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long r = 0; r < n; ++r) rows[r] = assembleRow(compiled, basis, Z, static_cast<std::size_t>(r));
  for (auto& row : rows) p.entries.insert(p.entries.end(), row.begin(), row.end());
  return p;
}

SparsePencil assemblePencilSerial(const SeqOp& rec, const Basis& basis, int Z) {
  SparsePencil p = emptyPencil(basis, Z);
  const CompiledRecurrence compiled(rec);
  for (std::size_t r = 0; r < basis.size(); ++r) {
    auto row = assembleRow(compiled, basis, Z, r);
    p.entries.insert(p.entries.end(), row.begin(), row.end());
  }
  return p;
}

SparsePencil permutePencil(const SparsePencil& p, const std::vector<std::size_t>& perm) {
  SparsePencil out = p;
  out.basis = p.basis.permuted(perm);
  std::vector<std::int32_t> newIndex(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) newIndex[perm[i]] = static_cast<std::int32_t>(i);
  for (auto& e : out.entries) {
    e.row = newIndex[e.row];
    e.col = newIndex[e.col];
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const auto& x, const auto& y) {
    return std::tie(x.row, x.col) < std::tie(y.row, y.col);
  });
  return out;
}

std::size_t SparsePencil::nnzA() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.a != 0; }));
}

std::size_t SparsePencil::nnzB() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.b != 0; }));
}

std::size_t SparsePencil::maxRowEntries() const {
  std::vector<std::size_t> counts(dim, 0);
  for (const auto& e : entries) ++counts[e.row];
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

std::vector<double> SparsePencil::dense(double eps) const {
  std::vector<double> m(dim * dim, 0.0);
  for (const auto& e : entries)
    m[static_cast<std::size_t>(e.row) * dim + e.col] =
        static_cast<double>(e.a) - eps * static_cast<double>(e.b);
  return m;
}

// ---------------------------------------------------------------------------

nlohmann::json pencilManifest(const SparsePencil& p) {
  return {{"omega", p.basis.omega()},
          {"symClass", std::string(symClassName(p.basis.symClass()))},
          {"Z", p.charge},
          {"dim", p.dim},
          {"nnzA", p.nnzA()},
          {"nnzB", p.nnzB()},
          {"ordering", std::string(Basis::kOrdering)},
          {"convention", "M(eps) = A - eps*B, 1-based indices"}};
}

namespace {

void writeMatrixMarket(const std::filesystem::path& path, const SparsePencil& p, bool takeA) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  const std::size_t nnz = takeA ? p.nnzA() : p.nnzB();
  out << "%%MatrixMarket matrix coordinate integer general\n";
  out << "% " << (takeA ? "A" : "B") << " of M(eps) = A - eps*B, Z=" << p.charge
      << " omega=" << p.basis.omega() << " " << symClassName(p.basis.symClass()) << "\n";
  out << p.dim << " " << p.dim << " " << nnz << "\n";
  for (const auto& e : p.entries) {
    const std::int64_t v = takeA ? e.a : e.b;
    if (v != 0) out << e.row + 1 << " " << e.col + 1 << " " << v << "\n";
  }
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<std::tuple<int, int, std::int64_t>> readMatrixMarket(const std::filesystem::path& path,
                                                                 std::size_t& dim) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::string line;
  std::vector<std::tuple<int, int, std::int64_t>> out;
  bool sized = false;
  std::size_t nnz = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    if (!sized) {
      std::size_t rows = 0, cols = 0;
      if (!(ls >> rows >> cols >> nnz) || rows != cols)
        throw Error("malformed size line in " + path.string());
      dim = rows;
      sized = true;
      continue;
    }
    int r = 0, c = 0;
    std::int64_t v = 0;
    if (!(ls >> r >> c >> v)) throw Error("malformed entry in " + path.string() + ": " + line);
    out.emplace_back(r - 1, c - 1, v);
  }
  if (!sized || out.size() != nnz) throw Error("entry count mismatch in " + path.string());
  return out;
}

}  // namespace

ExportPaths exportPencil(const SparsePencil& p, ExportFormat format,
                         const std::filesystem::path& stem) {
  ExportPaths paths;
  nlohmann::json manifest = pencilManifest(p);
  paths.manifest = stem;
  paths.manifest += ".json";
  if (format == ExportFormat::matrixMarket) {
    paths.matrixA = stem;
    paths.matrixA += "_A.mtx";
    paths.matrixB = stem;
    paths.matrixB += "_B.mtx";
    writeMatrixMarket(paths.matrixA, p, true);
    writeMatrixMarket(paths.matrixB, p, false);
    manifest["format"] = "matrix-market-pair";
    manifest["files"] = {{"A", paths.matrixA.filename().string()},
                         {"B", paths.matrixB.filename().string()}};
  } else {
    manifest["format"] = "json";
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : p.entries) entries.push_back({e.row + 1, e.col + 1, e.a, e.b});
    manifest["entries"] = std::move(entries);
  }
  std::ofstream out(paths.manifest);
  if (!out) throw Error("cannot write " + paths.manifest.string());
  out << manifest.dump(2) << "\n";
  if (!out) throw Error("write failed for " + paths.manifest.string());
  return paths;
}

SparsePencil importPencil(const std::filesystem::path& manifestPath) {
  std::ifstream in(manifestPath);
  if (!in) throw Error("cannot read " + manifestPath.string());
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed manifest " + manifestPath.string() + ": " + e.what());
  }
  const Basis basis(m.at("omega").get<int>(),
                    symClassFromName(m.at("symClass").get<std::string>()));
  SparsePencil p = emptyPencil(basis, m.at("Z").get<int>());
  if (p.dim != m.at("dim").get<std::size_t>())
    throw Error("manifest dimension disagrees with its basis in " + manifestPath.string());

  std::map<std::pair<int, int>, std::pair<std::int64_t, std::int64_t>> merged;
  if (m.at("format") == "json") {
    for (const auto& e : m.at("entries"))
      merged[{e.at(0).get<int>() - 1, e.at(1).get<int>() - 1}] = {e.at(2).get<std::int64_t>(),
                                                                  e.at(3).get<std::int64_t>()};
  } else {
    const auto dir = manifestPath.parent_path();
    std::size_t dimA = 0, dimB = 0;
    for (const auto& [r, c, v] : readMatrixMarket(dir / m.at("files").at("A").get<std::string>(), dimA))
      merged[{r, c}].first = v;
    for (const auto& [r, c, v] : readMatrixMarket(dir / m.at("files").at("B").get<std::string>(), dimB))
      merged[{r, c}].second = v;
    if (dimA != p.dim || dimB != p.dim) throw Error("matrix dimension disagrees with manifest");
  }
  for (const auto& [rc, ab] : merged) {
    if (rc.first < 0 || rc.second < 0 || rc.first >= static_cast<int>(p.dim) ||
        rc.second >= static_cast<int>(p.dim))
      throw Error("entry index out of range in " + manifestPath.string());
    p.entries.push_back({rc.first, rc.second, ab.first, ab.second});
  }
  return p;
}

}  // namespace twoel
