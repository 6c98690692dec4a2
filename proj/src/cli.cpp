#include "twoel/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <unistd.h>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "twoel/charpoly.hpp"
#include "twoel/errors.hpp"
#include "twoel/pipeline.hpp"
#include "twoel/spectral.hpp"

namespace twoel {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<int> parseIntList(std::string_view text) {
  std::vector<int> out;
  auto toInt = [&](std::string_view s) {
    if (s.empty()) throw DomainError("empty item in integer list '" + std::string(text) + "'");
    std::size_t used = 0;
    const std::string str(s);
    int v = 0;
    try {
      v = std::stoi(str, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != str.size()) throw DomainError("not an integer: '" + str + "'");
    return v;
  };
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view item = text.substr(pos, comma - pos);
    const std::size_t dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(toInt(item));
    } else {
      const int lo = toInt(item.substr(0, dots)), hi = toInt(item.substr(dots + 2));
      if (lo > hi) throw DomainError("descending range '" + std::string(item) + "'");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    }
    pos = comma + 1;
  }
  return out;
}

fs::path defaultCacheDir() {
  if (const char* d = std::getenv("TWOEL_CACHE_DIR"); d && *d) return d;
  if (const char* d = std::getenv("XDG_CACHE_HOME"); d && *d) return fs::path(d) / "twoel";
  if (const char* d = std::getenv("HOME"); d && *d) return fs::path(d) / ".cache" / "twoel";
  return fs::temp_directory_path() / "twoel";
}

namespace {

fs::path cacheFile(const fs::path& dir, bool interaction) {
  return dir / ("recurrence-" + std::string(interaction ? "full" : "free") + "-v" +
                std::string(kCodeVersion) + ".json");
}

std::optional<Recurrence> readCached(const fs::path& file, bool interaction) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  try {
    const json j = json::parse(in);
    if (j.at("version") != kCodeVersion || j.at("interaction") != interaction) return std::nullopt;
    Recurrence rec;
    rec.op = seqOpFromJson(j.at("recurrence"));
    rec.scale = Rational(j.at("scale").get<std::string>());
    rec.scale.canonicalize();
    rec.shape = measureShape(rec.op);
    if (interaction) checkRecurrenceShape(rec.shape);
    return rec;
  } catch (const std::exception&) {
    return std::nullopt;  // corrupt or stale entry: derive again
  }
}

void writeCached(const fs::path& file, bool interaction, const Recurrence& rec) {
  std::error_code ec;
  fs::create_directories(file.parent_path(), ec);
  const json j = {{"version", kCodeVersion},
                  {"interaction", interaction},
                  {"scale", rec.scale.get_str()},
                  {"recurrence", toJson(rec.op)}};
  const fs::path tmp = file.string() + ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp);
    if (!out) return;
    out << j.dump() << '\n';
    if (!out) return;
  }
  fs::rename(tmp, file, ec);
  if (ec) fs::remove(tmp, ec);
}

Recurrence deriveRecurrence(bool interaction) {
  const DiffOp op = perimetricOperator({interaction});
  return interaction ? validatedRecurrence(op) : transferRecurrence(op);
}

}  // namespace

const Recurrence& loadOrDeriveRecurrence(bool interaction, const std::optional<fs::path>& dir) {
  if (dir) {
    const fs::path file = cacheFile(*dir, interaction);
    if (auto rec = readCached(file, interaction)) {
      primeRecurrenceCache(interaction, std::move(*rec));
    } else {
      Recurrence fresh = deriveRecurrence(interaction);
      writeCached(file, interaction, fresh);
      primeRecurrenceCache(interaction, std::move(fresh));
    }
  }
  return cachedRecurrence(interaction);
}

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed(double x, int digits = 10) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << x;
  return os.str();
}

std::string sci(double x) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << x;
  return os.str();
}

struct Common {
  int threads = 0;
  std::string cacheDir;
  bool noCache = false;
};

struct DeriveArgs {
  std::string stage = "recurrence";
  bool noInteraction = false;
  std::string format = "text";
  std::string out;
};

struct EnergyArgs {
  int charge = 2;
  int omega = 12;
  std::string state = "para";
  double tol = 1e-12;
  double residualTol = 1e-8;
  bool vector = false;
  bool noInteraction = false;
  std::string format = "text";
  std::string out;
};

struct TableArgs {
  std::string charges = "1..10";
  int omega = 12;
  std::string state = "para";
  bool noInteraction = false;
  std::string format = "text";
  std::string out;
};

struct CharpolyArgs {
  int charge = 2;
  int omega = 10;
  std::string state = "para";
  std::string strategy = "hadamard";
  bool checkRoots = false;
  double checkTol = 1e-8;
  bool noInteraction = false;
  std::string format = "text";
  std::string out;
};

struct ExportArgs {
  int charge = 2;
  int omega = 10;
  std::string state = "para";
  std::string format = "matrixmarket";
  bool noInteraction = false;
  std::string out;
};

struct ReportArgs {
  int charge = 2;
  std::string omegaList = "6,8,10,12";
  std::string state = "para";
  bool noInteraction = false;
  std::string out;
};

// Writes to --out when given, otherwise to the command's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw DomainError("cannot open '" + path + "' for writing");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

class Runner {
 public:
  Runner(const Common& common, std::ostream& out, std::ostream& err)
      : common_(common), out_(out), err_(err) {}

  const Recurrence& recurrence(bool interaction) {
    std::optional<fs::path> dir;
    if (!common_.noCache) dir = common_.cacheDir.empty() ? defaultCacheDir() : fs::path(common_.cacheDir);
    return loadOrDeriveRecurrence(interaction, dir);
  }

  SparsePencil pencil(int Z, int omega, const std::string& state, bool interaction) {
    const Recurrence& rec = recurrence(interaction);
    return assemblePencil(rec.op, enumerateBasis(omega, symClassFromName(state)), Z);
  }

  void warnCharge(int Z) {
    if (Z > 10) err_ << "warning: charge " << Z << " lies outside the tabulated range 1..10\n";
  }

  int derive(const DeriveArgs& a);
  int energy(const EnergyArgs& a);
  int table(const TableArgs& a);
  int charpoly(const CharpolyArgs& a);
  int exportPencil(const ExportArgs& a);
  int report(const ReportArgs& a);

 private:
  const Common& common_;
  std::ostream& out_;
  std::ostream& err_;
};

json shapeJson(const RecurrenceShape& s) {
  return {{"terms", s.terms},
          {"maxIndexDegree", s.maxIndexDegree},
          {"maxZDegree", s.maxZDegree},
          {"maxEpsDegree", s.maxEpsDegree}};
}

// delta_{000} is annihilated at eps = Z iff the hydrogenic product state solves
// the truncated system exactly.
bool deltaKernelTest(const SeqOp& op, int Z) {
  const SparseArray delta{{Triple{0, 0, 0}, Rational(1)}};
  return recurrenceApply(op, delta, {{Var::Z, Rational(Z)}, {Var::eps, Rational(Z)}}).empty();
}

int Runner::derive(const DeriveArgs& a) {
  const bool interaction = !a.noInteraction;
  const bool asJson = a.format == "json";
  Sink sink(a.out, out_);
  const auto t0 = Clock::now();

  if (a.stage == "hylleraas" || a.stage == "perimetric") {
    const DiffOp op = a.stage == "hylleraas" ? hylleraasOperator({interaction})
                                             : perimetricOperator({interaction});
    if (asJson) {
      json j = toJson(op);
      j["stage"] = a.stage;
      j["interaction"] = interaction;
      *sink << j.dump(2) << '\n';
    } else {
      *sink << toText(op) << '\n';
      if (a.stage == "perimetric") {
        const EulerReport euler = eulerCheck(op);
        *sink << "# euler condition (x^i in front of d_x^i): "
              << (euler.ok ? std::string("ok")
                           : std::to_string(euler.violations.size()) + " violating monomials")
              << '\n';
        if (!euler.ok) {
          const LaguerreReduced reduced = laguerreReduce(op);
          *sink << "# after rewriting x*d_x^2 through the Laguerre equation: "
                << (reduced.residual.ok ? "ok" : "still violated") << '\n';
        }
      }
    }
    return kExitOk;
  }

  // Always a fresh derivation here; the disk cache is for the numeric commands.
  const DiffOp op = perimetricOperator({interaction});
  const Recurrence rec = interaction ? validatedRecurrence(op) : transferRecurrence(op);
  const double seconds = secondsSince(t0);

  std::optional<bool> kernel;
  if (!interaction) {
    kernel = true;
    for (int Z = 1; Z <= 10; ++Z) kernel = *kernel && deltaKernelTest(rec.op, Z);
  }

  if (asJson) {
    json j = {{"stage", "recurrence"},
              {"interaction", interaction},
              {"scale", rationalToString(rec.scale)},
              {"shape", shapeJson(rec.shape)},
              {"validated", interaction},
              {"seconds", seconds},
              {"recurrence", toJson(rec.op)}};
    if (kernel) j["kernelTest"] = {{"charges", "1..10"}, {"pass", *kernel}};
    *sink << j.dump(2) << '\n';
  } else {
    *sink << toText(rec.op) << '\n';
    *sink << "# " << rec.shape.terms << " shifts, index degree " << rec.shape.maxIndexDegree
          << ", deg_Z " << rec.shape.maxZDegree << ", deg_eps " << rec.shape.maxEpsDegree;
    *sink << (interaction ? " (validated)" : "") << '\n';
    if (kernel)
      *sink << "# kernel test: delta_000 annihilated at eps = Z for Z = 1..10: "
            << (*kernel ? "pass" : "FAIL") << '\n';
    *sink << "# derived in " << fixed(seconds, 3) << " s\n";
  }
  return kernel.value_or(true) ? kExitOk : kExitInternal;
}

int Runner::energy(const EnergyArgs& a) {
  warnCharge(a.charge);
  const bool interaction = !a.noInteraction;
  recurrence(interaction);
  const auto t0 = Clock::now();
  GroundStateOptions opts;
  opts.interaction = interaction;
  opts.root.tol = a.tol;
  const EigenResult r = groundState(a.charge, a.omega, symClassFromName(a.state), opts);
  const double seconds = secondsSince(t0);

  Sink sink(a.out, out_);
  if (a.format == "json") {
    json j = toJson(r, a.vector);
    j["seconds"] = seconds;
    *sink << j.dump(2) << '\n';
  } else {
    auto row = [&](const char* k, const std::string& v) {
      *sink << std::left << std::setw(12) << k << v << '\n';
    };
    row("Z", std::to_string(r.Z));
    row("state", std::string(symClassName(r.symClass)));
    row("omega", std::to_string(r.omega));
    row("dim", std::to_string(r.dim));
    row("epsilon", fixed(r.epsilon));
    row("energy", fixed(r.energy));
    row("residual", sci(r.residual));
    row("iterations", std::to_string(r.iterations));
    row("seconds", fixed(seconds, 3));
    if (!interaction) row("interaction", "off");
    if (a.vector) {
      *sink << "\n l  m  n  coefficient\n";
      for (std::size_t i = 0; i < r.vector.size(); ++i) {
        const auto& t = r.triples[i];
        *sink << std::right << std::setw(2) << t[0] << ' ' << std::setw(2) << t[1] << ' '
              << std::setw(2) << t[2] << "  " << std::setw(19) << std::scientific
              << std::setprecision(12) << r.vector[i] << '\n';
      }
    }
  }
  for (const auto& w : r.warnings) err_ << "warning: " << w << '\n';
  if (r.residual > a.residualTol) {
    err_ << "error: residual " << sci(r.residual) << " exceeds " << sci(a.residualTol) << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

int Runner::table(const TableArgs& a) {
  const std::vector<int> charges = parseIntList(a.charges);
  for (int Z : charges)
    if (Z < 1 || Z > 10) throw DomainError("charges must lie in 1..10");
  const bool interaction = !a.noInteraction;
  const SymClass cls = symClassFromName(a.state);
  recurrence(interaction);

  struct Row {
    int Z;
    std::optional<EigenResult> result;
    std::string error;
    double seconds = 0;
  };
  std::vector<Row> rows;
  for (int Z : charges) rows.push_back({Z, std::nullopt, {}, 0});

  const long count = static_cast<long>(rows.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    const auto t0 = Clock::now();
    try {
      GroundStateOptions opts;
      opts.interaction = interaction;
      rows[i].result = groundState(rows[i].Z, a.omega, cls, opts);
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
    rows[i].seconds = secondsSince(t0);
  }

  bool failed = false;
  Sink sink(a.out, out_);
  if (a.format == "json") {
    json list = json::array();
    for (const auto& r : rows) {
      if (r.result) {
        list.push_back({{"Z", r.Z},
                        {"dim", r.result->dim},
                        {"epsilon", r.result->epsilon},
                        {"energy", r.result->energy},
                        {"residual", r.result->residual},
                        {"iterations", r.result->iterations},
                        {"seconds", r.seconds}});
      } else {
        failed = true;
        list.push_back({{"Z", r.Z}, {"error", r.error}});
      }
    }
    *sink << json{{"omega", a.omega}, {"symClass", a.state}, {"interaction", interaction},
                  {"rows", list}}
                 .dump(2)
          << '\n';
  } else {
    *sink << " Z   dim        epsilon            energy   residual  iter  seconds\n";
    for (const auto& r : rows) {
      *sink << std::right << std::setw(2) << r.Z;
      if (!r.result) {
        failed = true;
        *sink << "  failed: " << r.error << '\n';
        continue;
      }
      *sink << std::setw(6) << r.result->dim << std::setw(15) << fixed(r.result->epsilon)
            << std::setw(18) << fixed(r.result->energy) << std::setw(11) << sci(r.result->residual)
            << std::setw(6) << r.result->iterations << std::setw(9) << fixed(r.seconds, 3) << '\n';
    }
  }
  return failed ? kExitNumerical : kExitOk;
}

int Runner::charpoly(const CharpolyArgs& a) {
  warnCharge(a.charge);
  const bool interaction = !a.noInteraction;
  const SparsePencil p = pencil(a.charge, a.omega, a.state, interaction);
  CharPolyOptions opts;
  opts.strategy = a.strategy == "stabilize" ? PrimeStrategy::stabilize : PrimeStrategy::hadamard;

  const auto t0 = Clock::now();
  CharPoly cp;
  try {
    cp = charPolyExact(p, opts);
  } catch (const InconclusiveError& e) {
    err_ << "error: " << e.what() << "\nprovenance: strategy " << a.strategy << ", dim " << p.dim
         << ", evaluation points 0.." << p.dim << '\n';
    return kExitNumerical;
  }
  const double seconds = secondsSince(t0);

  json j = toJson(cp);
  j["Z"] = a.charge;
  j["omega"] = a.omega;
  j["symClass"] = a.state;
  j["interaction"] = interaction;
  j["dim"] = p.dim;
  j["seconds"] = seconds;

  int code = kExitOk;
  std::string checkLine;
  if (a.checkRoots) {
    GroundStateOptions gopts;
    gopts.interaction = interaction;
    const EigenResult g = groundStateFromPencil(p, gopts);
    json check;
    try {
      check = toJson(crossCheckRoots(cp, a.charge, g.epsilon, a.checkTol));
      check["ok"] = true;
      checkLine = "largest root " + fixed(check["largestExact"].get<double>(), 12) + " vs numeric " +
                  fixed(g.epsilon, 12) + ", gap " + sci(check["gap"].get<double>());
    } catch (const ConsistencyError& e) {
      check = {{"ok", false}, {"numeric", g.epsilon}, {"message", e.what()}};
      checkLine = std::string("FAILED: ") + e.what();
      code = kExitNumerical;
    }
    check["tolerance"] = a.checkTol;
    check["valueAtCharge"] = cp.evaluate(a.charge).get_str();
    j["check"] = std::move(check);
  }

  if (a.format == "json" || !a.out.empty()) {
    Sink sink(a.out, out_);
    *sink << j.dump(2) << '\n';
  }
  if (a.format != "json") {
    out_ << "dim " << p.dim << ", degree " << cp.degree() << ", largest coefficient "
         << cp.maxDigits() << " digits, " << cp.primes.size() << " primes, "
         << fixed(seconds, 2) << " s\n";
    if (a.checkRoots) out_ << "root check: " << checkLine << '\n';
    if (a.out.empty()) {
      for (int k = cp.degree(); k >= 0; --k) out_ << "eps^" << k << "  " << cp.coeffs[k] << '\n';
    } else {
      out_ << "wrote " << a.out << '\n';
    }
  }
  return code;
}

int Runner::exportPencil(const ExportArgs& a) {
  warnCharge(a.charge);
  const SparsePencil p = pencil(a.charge, a.omega, a.state, !a.noInteraction);
  const std::string stem = a.out.empty() ? "pencil_Z" + std::to_string(a.charge) + "_w" +
                                               std::to_string(a.omega) + "_" + a.state
                                         : a.out;
  const ExportFormat fmt = a.format == "json" ? ExportFormat::json : ExportFormat::matrixMarket;
  const ExportPaths paths = twoel::exportPencil(p, fmt, stem);
  out_ << "dim " << p.dim << ", nnz(A) " << p.nnzA() << ", nnz(B) " << p.nnzB() << '\n';
  out_ << "wrote " << paths.manifest.string() << '\n';
  if (!paths.matrixA.empty())
    out_ << "wrote " << paths.matrixA.string() << "\nwrote " << paths.matrixB.string() << '\n';
  return kExitOk;
}

int Runner::report(const ReportArgs& a) {
  warnCharge(a.charge);
  const std::vector<int> omegas = parseIntList(a.omegaList);
  for (int w : omegas)
    if (w < 0) throw DomainError("omega values must be >= 0");
  const bool interaction = !a.noInteraction;
  const SymClass cls = symClassFromName(a.state);
  const Recurrence& rec = recurrence(interaction);

  struct Row {
    int omega;
    EigenResult r;
    double seconds;
  };
  std::vector<Row> rows;
  for (int w : omegas) {
    const auto t0 = Clock::now();
    GroundStateOptions opts;
    opts.interaction = interaction;
    EigenResult r = groundState(a.charge, w, cls, opts);
    rows.push_back({w, std::move(r), secondsSince(t0)});
  }

  Sink sink(a.out, out_);
  std::ostream& md = *sink;
  md << "# Ground state, Z = " << a.charge << ", " << a.state << "\n\n";
  md << "## Configuration\n\n| setting | value |\n|---|---|\n";
  md << "| code version | " << kCodeVersion << " |\n";
  md << "| charge Z | " << a.charge << " |\n";
  md << "| symmetry class | " << a.state << " |\n";
  md << "| electron repulsion | " << (interaction ? "on" : "off") << " |\n";
  md << "| omega values | " << a.omegaList << " |\n";
  md << "| recurrence | " << rec.shape.terms << " shifts, index degree " << rec.shape.maxIndexDegree
     << ", deg_Z " << rec.shape.maxZDegree << ", deg_eps " << rec.shape.maxEpsDegree << " |\n";
  md << "| threads | " << omp_get_max_threads() << " |\n\n";

  md << "## Convergence\n\n";
  md << "| omega | dim | epsilon | energy | change in epsilon | residual | seconds |\n";
  md << "|---:|---:|---:|---:|---:|---:|---:|\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i].r;
    md << "| " << rows[i].omega << " | " << r.dim << " | " << fixed(r.epsilon) << " | "
       << fixed(r.energy) << " | "
       << (i == 0 ? std::string("") : sci(std::abs(r.epsilon - rows[i - 1].r.epsilon))) << " | "
       << sci(r.residual) << " | " << fixed(rows[i].seconds, 3) << " |\n";
  }
  if (!rows.empty()) {
    const auto& last = rows.back().r;
    md << "\n## Final energy\n\n";
    md << "E = " << fixed(last.energy) << " hartree at omega = " << last.omega
       << " (epsilon = " << fixed(last.epsilon) << ", dimension " << last.dim << ").\n";
  }
  for (const auto& row : rows)
    for (const auto& w : row.r.warnings) err_ << "warning: " << w << '\n';
  return kExitOk;
}

int applyThreads(int requested, std::ostream& err) {
  int n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("TWOEL_THREADS"); env && *env) {
      try {
        n = std::stoi(env);
      } catch (const std::exception&) {
        n = -1;
      }
      if (n < 1) {
        err << "error: TWOEL_THREADS must be a positive integer\n";
        return kExitUsage;
      }
    }
  }
  if (n > 0) omp_set_num_threads(n);
  return kExitOk;
}

}  // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-electron atom ground states from an automatically derived recurrence",
               "twoel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kCodeVersion));

  Common common;
  app.add_option("--threads", common.threads, "Worker threads (default: TWOEL_THREADS or all)")
      ->check(CLI::PositiveNumber);
  app.add_option("--cache-dir", common.cacheDir, "Recurrence cache directory");
  app.add_flag("--no-cache", common.noCache, "Derive the recurrence without touching the disk cache");

  const auto states = CLI::IsMember({"para", "ortho"});
  const auto formats = CLI::IsMember({"text", "json"});

  DeriveArgs derive;
  auto* cDerive = app.add_subcommand("derive", "Print a stage of the operator derivation");
  cDerive->add_option("--stage", derive.stage)
      ->check(CLI::IsMember({"hylleraas", "perimetric", "recurrence"}));
  cDerive->add_flag("--no-interaction", derive.noInteraction, "Drop the 1/r12 repulsion");
  cDerive->add_option("--format", derive.format, "text or json")->check(formats);
  cDerive->add_option("--out", derive.out, "Output file");

  EnergyArgs energy;
  auto* cEnergy = app.add_subcommand("energy", "Ground-state energy for one charge and truncation");
  cEnergy->add_option("--charge", energy.charge, "Nuclear charge Z")->check(CLI::PositiveNumber);
  cEnergy->add_option("--omega", energy.omega, "Truncation l+m+n <= omega")->check(CLI::NonNegativeNumber);
  cEnergy->add_option("--state", energy.state, "para or ortho")->check(states);
  cEnergy->add_option("--tol", energy.tol, "Root bracket width")->check(CLI::PositiveNumber);
  cEnergy->add_option("--residual-tol", energy.residualTol, "Fail (exit 2) above this residual")->check(CLI::PositiveNumber);
  cEnergy->add_flag("--vector", energy.vector, "Include the eigenvector");
  cEnergy->add_flag("--no-interaction", energy.noInteraction, "Drop the 1/r12 repulsion");
  cEnergy->add_option("--format", energy.format, "text or json")->check(formats);
  cEnergy->add_option("--out", energy.out, "Output file (default stdout)");

  TableArgs table;
  auto* cTable = app.add_subcommand("table", "Energies for a list of charges");
  cTable->add_option("--charges", table.charges, "e.g. 1..10 or 2,3,4");
  cTable->add_option("--omega", table.omega, "Truncation l+m+n <= omega")->check(CLI::NonNegativeNumber);
  cTable->add_option("--state", table.state, "para or ortho")->check(states);
  cTable->add_flag("--no-interaction", table.noInteraction, "Drop the 1/r12 repulsion");
  cTable->add_option("--format", table.format, "text or json")->check(formats);
  cTable->add_option("--out", table.out, "Output file (default stdout)");

  CharpolyArgs charpoly;
  auto* cCharpoly = app.add_subcommand("charpoly", "Exact integer polynomial det(A - eps B)");
  cCharpoly->add_option("--charge", charpoly.charge, "Nuclear charge Z")->check(CLI::PositiveNumber);
  cCharpoly->add_option("--omega", charpoly.omega, "Truncation l+m+n <= omega")->check(CLI::NonNegativeNumber);
  cCharpoly->add_option("--state", charpoly.state, "para or ortho")->check(states);
  cCharpoly->add_option("--strategy", charpoly.strategy)
      ->check(CLI::IsMember({"hadamard", "stabilize"}));
  cCharpoly->add_flag("--check-roots", charpoly.checkRoots,
                      "Compare the largest exact root with the numeric one");
  cCharpoly->add_option("--check-tol", charpoly.checkTol, "Allowed exact vs numeric root gap")->check(CLI::PositiveNumber);
  cCharpoly->add_flag("--no-interaction", charpoly.noInteraction, "Drop the 1/r12 repulsion");
  cCharpoly->add_option("--format", charpoly.format, "text or json")->check(formats);
  cCharpoly->add_option("--out", charpoly.out, "JSON output file");

  ExportArgs exportArgs;
  auto* cExport = app.add_subcommand("export", "Write the pencil (A, B) and a manifest");
  cExport->add_option("--charge", exportArgs.charge, "Nuclear charge Z")->check(CLI::PositiveNumber);
  cExport->add_option("--omega", exportArgs.omega, "Truncation l+m+n <= omega")->check(CLI::NonNegativeNumber);
  cExport->add_option("--state", exportArgs.state, "para or ortho")->check(states);
  cExport->add_option("--format", exportArgs.format, "text or json")->check(CLI::IsMember({"matrixmarket", "json"}));
  cExport->add_flag("--no-interaction", exportArgs.noInteraction, "Drop the 1/r12 repulsion");
  cExport->add_option("--out", exportArgs.out, "Output path stem");

  ReportArgs report;
  auto* cReport = app.add_subcommand("report", "Markdown convergence report");
  cReport->add_option("--charge", report.charge, "Nuclear charge Z")->check(CLI::PositiveNumber);
  cReport->add_option("--omega-list", report.omegaList, "e.g. 6,8,10,12");
  cReport->add_option("--state", report.state, "para or ortho")->check(states);
  cReport->add_flag("--no-interaction", report.noInteraction, "Drop the 1/r12 repulsion");
  cReport->add_option("--out", report.out, "Markdown file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }
  if (const int rc = applyThreads(common.threads, err); rc != kExitOk) return rc;

  Runner runner(common, out, err);
  try {
    if (*cDerive) return runner.derive(derive);
    if (*cEnergy) return runner.energy(energy);
    if (*cTable) return runner.table(table);
    if (*cCharpoly) return runner.charpoly(charpoly);
    if (*cExport) return runner.exportPencil(exportArgs);
    if (*cReport) return runner.report(report);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DerivationMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NoRootError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IterationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InconclusiveError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConsistencyError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"twoel"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return runCli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace twoel
