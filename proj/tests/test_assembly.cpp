#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "twoel/assembly.hpp"
#include "twoel/spectral.hpp"

using namespace twoel;

namespace {

const SeqOp& fullRec() { return cachedRecurrence(true).op; }
const SeqOp& freeRec() { return cachedRecurrence(false).op; }

}  // namespace

TEST_CASE("basis dimensions") {
  CHECK(basisDimension(10, SymClass::para) == 161);
  CHECK(enumerateBasis(10, SymClass::para).size() == 161);
  CHECK(basisDimension(60, SymClass::para) == 20336);
  CHECK(enumerateBasis(60, SymClass::para).size() == 20336);
  CHECK(enumerateBasis(0, SymClass::para).size() == 1);
  CHECK(enumerateBasis(10, SymClass::ortho).size() == 125);
  CHECK(basisDimension(4, SymClass::para) == 22);
  for (int w = 0; w <= 20; ++w) {
    CHECK(basisDimension(w, SymClass::para) == oracle::countTriples(w, true));
    CHECK(basisDimension(w, SymClass::ortho) == oracle::countTriples(w, false));
    CHECK(enumerateBasis(w, SymClass::ortho).size() == oracle::countTriples(w, false));
  }
}

TEST_CASE("basis ordering and lookup") {
  const Basis b = enumerateBasis(6, SymClass::para);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.indexOf(b.triple(i)) == static_cast<int>(i));
  for (std::size_t i = 1; i < b.size(); ++i) {
    const auto &p = b.triple(i - 1), &q = b.triple(i);
    const auto key = [](const Triple& t) { return std::array<int, 3>{t[0] + t[1] + t[2], t[0], t[1]}; };
    CHECK(key(p) < key(q));
  }
  CHECK(b.indexOf({2, 1, 0}) == -1);
  CHECK(b.indexOf({0, 0, 7}) == -1);
}

TEST_CASE("fold") {
  auto f = fold({2, 1, 3}, SymClass::para, 6);
  REQUIRE(f);
  CHECK(f->triple == Triple{1, 2, 3});
  CHECK(f->sign == 1);
  auto g = fold({2, 1, 3}, SymClass::ortho, 6);
  REQUIRE(g);
  CHECK(g->sign == -1);
  CHECK_FALSE(fold({1, 1, 3}, SymClass::ortho, 6));
  CHECK_FALSE(fold({-1, 0, 2}, SymClass::para, 6));
  CHECK_FALSE(fold({2, 2, 3}, SymClass::para, 6));

  for (SymClass cls : {SymClass::para, SymClass::ortho}) {
    const Basis b = enumerateBasis(5, cls);
    for (const auto& t : b.triples()) {
      auto same = fold(t, cls, 5);
      REQUIRE(same);
      CHECK(same->triple == t);
      CHECK(same->sign == 1);
      auto swapped = fold({t[1], t[0], t[2]}, cls, 5);
      REQUIRE(swapped);
      CHECK(swapped->triple == t);
      CHECK(swapped->sign == (t[0] == t[1] || cls == SymClass::para ? 1 : -1));
    }
  }
}

TEST_CASE("hydrogenic column: A e1 = Z B e1") {
  for (int Z = 1; Z <= 10; ++Z)
    for (int w : {0, 2, 4, 7}) {
      const SparsePencil p = assemblePencil(freeRec(), enumerateBasis(w, SymClass::para), Z);
      const int col = p.basis.indexOf({0, 0, 0});
      bool zero = true;
      for (const auto& e : p.entries)
        if (e.col == col && e.a != static_cast<std::int64_t>(Z) * e.b) zero = false;
      CHECK(zero);
    }
}

TEST_CASE("row width is bounded by the stencil") {
  const SparsePencil p = assemblePencil(fullRec(), enumerateBasis(10, SymClass::para), 2);
  CHECK(p.maxRowEntries() <= 33);
  CHECK(p.dim == 161);
  for (std::size_t i = 1; i < p.entries.size(); ++i) {
    const auto &x = p.entries[i - 1], &y = p.entries[i];
    CHECK(std::tie(x.row, x.col) < std::tie(y.row, y.col));
  }
}

TEST_CASE("coefficients beyond linear in eps are rejected") {
  SeqOp bad;
  bad.add({0, 0, 0}, MultiPoly::variable(kIndexUniverse, Var::eps).pow(2));
  CHECK_THROWS_AS(assemblePencil(bad, enumerateBasis(2, SymClass::para), 2), StructureError);
}

TEST_CASE("permutation preserves the determinant exactly") {
  const SparsePencil p = assemblePencil(fullRec(), enumerateBasis(3, SymClass::para), 2);
  std::mt19937 rng(1);
  for (int trial = 0; trial < 3; ++trial) {
    const SparsePencil q = permutePencil(p, oracle::randomPermutation(p.dim, rng));
    for (long eps : {0L, 1L, 3L})
      CHECK(oracle::bareiss(oracle::denseInteger(p, eps)) == oracle::bareiss(oracle::denseInteger(q, eps)));
  }
}

TEST_CASE("export and import round trip") {
  const SparsePencil p = assemblePencil(fullRec(), enumerateBasis(4, SymClass::para), 2);
  const auto dir = std::filesystem::temp_directory_path() / "twoel-test-export";
  std::filesystem::create_directories(dir);
  for (ExportFormat fmt : {ExportFormat::matrixMarket, ExportFormat::json}) {
    const ExportPaths paths = exportPencil(p, fmt, dir / (fmt == ExportFormat::json ? "js" : "mm"));
    const SparsePencil q = importPencil(paths.manifest);
    CHECK(q.dim == p.dim);
    CHECK(q.charge == p.charge);
    CHECK(q.entries == p.entries);
    CHECK(q.basis.triples() == p.basis.triples());
  }
  CHECK(pencilManifest(p)["ordering"] == pencilManifest(p)["ordering"]);
  CHECK(pencilManifest(p)["dim"] == 22);
  CHECK(pencilManifest(assemblePencil(fullRec(), enumerateBasis(10, SymClass::para), 2))["dim"] == 161);
  CHECK_THROWS_AS(importPencil(dir / "missing.json"), Error);
  std::filesystem::remove_all(dir);
}
