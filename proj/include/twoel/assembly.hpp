#pragma once

// Truncated, symmetrized linear system M(eps) = A - eps*B over the index
// triples (l, m, n) with l + m + n <= omega.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "twoel/transfer.hpp"

namespace twoel {

enum class SymClass { para, ortho };

std::string_view symClassName(SymClass c);
SymClass symClassFromName(std::string_view name);

class Basis {
 public:
  Basis() = default;
  Basis(int omega, SymClass cls);

  int omega() const { return omega_; }
  SymClass symClass() const { return cls_; }
  std::size_t size() const { return triples_.size(); }
  const std::vector<Triple>& triples() const { return triples_; }
  const Triple& triple(std::size_t row) const { return triples_[row]; }

  // Row of a canonical triple, or -1 when it is not a basis member.
  int indexOf(const Triple& t) const;

  // Replaces the ordering by triples[perm[i]] at position i.
  Basis permuted(const std::vector<std::size_t>& perm) const;

  static constexpr std::string_view kOrdering =
      "graded lexicographic by (l+m+n, l, m); para l<=m, ortho l<m";

 private:
  void rebuildIndex();

  int omega_ = 0;
  SymClass cls_ = SymClass::para;
  std::vector<Triple> triples_;
  std::vector<int> lookup_;  // dense (omega+1)^3 table
};

Basis enumerateBasis(int omega, SymClass cls);

// (T +- D) / 2 with T = C(omega+3, 3) and D the number of triples with l = m.
std::size_t basisDimension(int omega, SymClass cls);

struct Folded {
  Triple triple;
  int sign;
};

// Maps any triple into the fundamental domain, or nullopt when the unknown is
// identically zero (negative index, beyond omega, ortho diagonal).
std::optional<Folded> fold(const Triple& t, SymClass cls, int omega);

struct PencilEntry {
  std::int32_t row;
  std::int32_t col;
  std::int64_t a;
  std::int64_t b;
  bool operator==(const PencilEntry&) const = default;
};

struct SparsePencil {
  std::size_t dim = 0;
  int charge = 0;
  Basis basis;
  std::vector<PencilEntry> entries;  // sorted by (row, col), no duplicates

  std::size_t nnzA() const;
  std::size_t nnzB() const;
  std::size_t maxRowEntries() const;
  // Row-major dense A - eps*B.
  std::vector<double> dense(double eps) const;
};

// Recurrence coefficients compiled to integer form for fast evaluation at
// integer (l, m, n, Z); each shift yields c0 + c1*eps.
class CompiledRecurrence {
 public:
  explicit CompiledRecurrence(const SeqOp& op);

  struct Linear {
    __int128 c0 = 0;
    __int128 c1 = 0;
  };
  struct Term {
    Shift shift;
    std::vector<std::pair<std::array<int, 4>, std::int64_t>> eps0;  // exponents of l,m,n,Z
    std::vector<std::pair<std::array<int, 4>, std::int64_t>> eps1;
  };

  const std::vector<Term>& terms() const { return terms_; }
  Linear evaluate(const Term& term, const Triple& t, int Z) const;

 private:
  std::vector<Term> terms_;
};

// Parallel over rows.
SparsePencil assemblePencil(const SeqOp& rec, const Basis& basis, int Z);
// Serial reference kept for testing the parallel kernel.
SparsePencil assemblePencilSerial(const SeqOp& rec, const Basis& basis, int Z);

// Same pencil with rows and columns reordered to `basis.permuted(perm)`.
SparsePencil permutePencil(const SparsePencil& p, const std::vector<std::size_t>& perm);

enum class ExportFormat { matrixMarket, json };

struct ExportPaths {
  std::filesystem::path manifest;
  std::filesystem::path matrixA;  // empty for json
  std::filesystem::path matrixB;
};

nlohmann::json pencilManifest(const SparsePencil& p);
ExportPaths exportPencil(const SparsePencil& p, ExportFormat format,
                         const std::filesystem::path& stem);
SparsePencil importPencil(const std::filesystem::path& manifest);

}  // namespace twoel
