// End-to-end checks of the command line tool: exit codes, stdout markers,
// output files, and byte determinism across thread counts. argv[1] is the
// path of the binary under test; exit code is the number of failed checks.
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int n_checks = 0;
int n_failed = 0;

void check(bool ok, const std::string& what) {
  ++n_checks;
  if (!ok) ++n_failed;
  std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what.c_str());
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult run(const std::string& cli, const std::string& args) {
  const std::string cmd =
      cli + " " + args + " > cli_smoke_tmp/out.txt 2> cli_smoke_tmp/err.txt";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp("cli_smoke_tmp/out.txt");
  r.err = slurp("cli_smoke_tmp/err.txt");
  return r;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

// first number following the marker, or NaN
double value_after(const std::string& text, const std::string& marker) {
  const std::size_t at = text.find(marker);
  if (at == std::string::npos) return std::nan("");
  return std::strtod(text.c_str() + at + marker.size(), nullptr);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (const char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

// data rows of a schema-then-header csv file
std::vector<std::vector<std::string>> csv_rows(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  const std::vector<std::string> lines = split(slurp(path), '\n');
  for (std::size_t i = 2; i < lines.size(); ++i)
    if (!lines[i].empty()) rows.push_back(split(lines[i], ','));
  return rows;
}

// out-of-range cells read as empty so a short file fails checks, not the run
std::string cell(const std::vector<std::string>& row, std::size_t i) {
  return i < row.size() ? row[i] : std::string();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <cli-binary>\n", argv[0]);
    return 64;
  }
  const std::string cli = argv[1];
  std::filesystem::create_directories("cli_smoke_tmp");

  {
    const RunResult r = run(cli, "spectrum --h 0.3 --gamma 0.2 --n 6 -o cli_smoke_tmp/sp1");
    check(r.code == 0, "spectrum exits 0");
    check(contains(r.out, "segment_count 3"), "three segments at h=0.3 gamma=0.2");
    check(contains(r.out, "pure_imaginary=1 generic=0"), "one bound pair reported");
    const std::string rap = slurp("cli_smoke_tmp/sp1_rapidity.csv");
    check(contains(rap, "# schema=rapidity-v1"), "rapidity csv carries its schema");
    check(csv_rows("cli_smoke_tmp/sp1_rapidity.csv").size() == 24, "24 rapidity rows");
    check(csv_rows("cli_smoke_tmp/sp1_liouvillian.csv").size() == 4096, "4096 eigenvalue rows");
    const std::string segs = slurp("cli_smoke_tmp/sp1_segments.json");
    check(contains(segs, "\"n_segments\": 3"), "segment json agrees");
  }

  {
    const RunResult r = run(cli, "spectrum --h 0.3 --gamma 0.2 --n 4 --oracle");
    check(r.code == 0, "spectrum --oracle exits 0");
    const double pairing = value_after(r.out, "oracle pairing error:");
    check(pairing >= 0.0 && pairing < 1e-7, "oracle pairing below 1e-7");
  }

  {
    const RunResult r = run(cli, "spectrum --h 3 --gamma 8 --n 6");
    check(r.code == 0, "nine-segment spectrum exits 0");
    check(contains(r.out, "segment_count 9"), "nine segments at h=3 gamma=8");
    check(contains(r.out, "pure_imaginary=2"), "two bound pairs reported");
  }

  {
    const RunResult r = run(cli, "spectrum --h 1 --gamma 0 --n 4 -o cli_smoke_tmp/sp0");
    check(r.code == 0, "closed chain exits 0");
    check(std::abs(value_after(r.out, "max Re lambda =")) < 1e-9, "closed chain is unitary");
    double worst_re = 0.0;
    for (const auto& row : csv_rows("cli_smoke_tmp/sp0_liouvillian.csv"))
      worst_re = std::max(worst_re, std::abs(std::strtod(cell(row, 1).c_str(), nullptr)));
    check(worst_re < 1e-9, "every written eigenvalue is purely imaginary");
  }

  {
    const RunResult r =
        run(cli, "spectrum --h 0.3 --gamma 0.2 --n 40 --rapidity-only -o cli_smoke_tmp/sp40");
    check(r.code == 0, "rapidity-only at n=40 exits 0");
    check(csv_rows("cli_smoke_tmp/sp40_rapidity.csv").size() == 160, "160 rapidity rows at n=40");
    check(!std::filesystem::exists("cli_smoke_tmp/sp40_liouvillian.csv"),
          "no enumeration output without the full spectrum");
  }

  {
    const RunResult r = run(cli, "spectrum --h 0.3 --gamma 0.2 --n 12");
    check(r.code == 2, "oversized enumeration exits 2");
    check(contains(r.err, "rapidity-only"), "error suggests --rapidity-only");
    const RunResult miss = run(cli, "spectrum --gamma 0.2");
    check(miss.code != 0, "missing required flag fails");
  }

  {
    const RunResult r = run(cli,
                            "phase-diagram --h-min 0.2 --h-max 3.5 --h-steps 8 "
                            "--gamma-min 0.2 --gamma-max 3.5 --gamma-steps 8 "
                            "-o cli_smoke_tmp/pd.csv");
    check(r.code == 0, "phase diagram exits 0");
    const std::string pd = slurp("cli_smoke_tmp/pd.csv");
    check(csv_rows("cli_smoke_tmp/pd.csv").size() == 64, "8x8 grid yields 64 rows");
    for (const char* s : {"one-segment", "three-segment", "five-segment", "nine-segment"})
      check(contains(pd, s), std::string("grid reaches the ") + s + " region");
    const RunResult single = run(cli,
                                 "phase-diagram --h-min 0.3 --h-max 0.3 --h-steps 1 "
                                 "--gamma-min 0.5 --gamma-max 0.5 --gamma-steps 1 "
                                 "-o cli_smoke_tmp/pd1.csv");
    check(single.code == 0, "single-point grid exits 0");
    const auto rows = csv_rows("cli_smoke_tmp/pd1.csv");
    check(rows.size() == 1 && cell(rows[0], 2) == "three-segment", "single-point grid classifies");
  }

  {
    const RunResult r =
        run(cli, "gap --h 0.3 --gamma-list 1 --n-list 8 --dual -o cli_smoke_tmp/gap1.csv");
    check(r.code == 0, "gap --dual exits 0");
    const auto rows = csv_rows("cli_smoke_tmp/gap1.csv");
    check(rows.size() == 1 && cell(rows[0], 4) == "ok", "one ok gap row");
    const std::string mism = rows.empty() || rows[0].empty() ? "" : rows[0].back();
    check(!mism.empty() && std::strtod(mism.c_str(), nullptr) == 0.0, "self-dual mismatch is zero");
    const RunResult zero =
        run(cli, "gap --h 0.3 --gamma-list 0 --n-list 6 -o cli_smoke_tmp/gap0.csv");
    check(zero.code == 0, "gamma=0 gap row exits 0");
    const auto zrows = csv_rows("cli_smoke_tmp/gap0.csv");
    check(zrows.size() == 1 && cell(zrows[0], 4) == "undefined" &&
              (!zrows[0].empty() && zrows[0].back() == "nan"),
          "gamma=0 row is undefined/nan");
  }

  {
    const RunResult r = run(cli,
                            "dynamics --h 0.3 --gamma-list 1 --n 12 --t-max 5 "
                            "--t-steps 11 --dual -o cli_smoke_tmp/dyn.csv");
    check(r.code == 0, "dynamics --dual exits 0");
    check(contains(r.out, "m_z(0)=1.000000"), "starts fully polarized");
    check(contains(r.out, "divergence vs 1/gamma 0 past"), "self-dual divergence is zero");
    const auto rows = csv_rows("cli_smoke_tmp/dyn.csv");
    check(rows.size() == 11, "11 time rows");
    bool dual_equal = true;
    for (const auto& row : rows) dual_equal = dual_equal && row.size() > 4 && row[2] == row[4];
    check(dual_equal, "m_z and m_z_dual coincide at gamma=1");
  }

  {
    const RunResult r = run(cli,
                            "dynamics --h 0.3 --gamma-list 0.5 --n 4 --t-max 5 "
                            "--t-steps 6 --oracle");
    check(r.code == 0, "dynamics --oracle exits 0");
    const double dev = value_after(r.out, "ed max deviation");
    check(dev >= 0.0 && dev < 1e-6, "density-matrix deviation below 1e-6");
  }

  {
    const RunResult r =
        run(cli, "disorder --h 3 --gamma 5 --n 6 --delta 0 --configs 5 -o cli_smoke_tmp/dis");
    check(r.code == 0, "disorder exits 0");
    check(contains(r.out, "preserved 5/5 (1.000)"), "zero disorder preserves all configs");
    check(contains(slurp("cli_smoke_tmp/dis_summary.json"), "\"preserved\": 5"),
          "summary json records preservation");
    check(contains(slurp("cli_smoke_tmp/dis_scatter.csv"), "# schema=disorder-scatter-v1"),
          "scatter csv carries its schema");
  }

  {
    const std::string scan = "gap --h 0.3 --gamma-min 0.5 --gamma-max 8 --gamma-steps 6 "
                             "--n-list 8,12";
    const RunResult a = run(cli, scan + " --threads 1 -o cli_smoke_tmp/det1.csv");
    const RunResult b = run(cli, scan + " --threads 2 -o cli_smoke_tmp/det2.csv");
    check(a.code == 0 && b.code == 0, "gap scans exit 0");
    const std::string f1 = slurp("cli_smoke_tmp/det1.csv");
    check(!f1.empty() && f1 == slurp("cli_smoke_tmp/det2.csv"),
          "thread count does not change output bytes");
    check(csv_rows("cli_smoke_tmp/det1.csv").size() == 12, "2 sizes x 6 gammas");
  }

  {
    const RunResult r =
        run(cli, "spectrum --h 0.3 --gamma 0.2 --n 4 -o cli_smoke_tmp/spj --format json");
    check(r.code == 0, "json output exits 0");
    const std::string doc = slurp("cli_smoke_tmp/spj_rapidity.json");
    check(!doc.empty() && doc.front() == '{' && contains(doc, "\"schema\": \"rapidity-v1\"") &&
              contains(doc, "\"rows\""),
          "rapidity json has schema and rows");
  }

  {
    const RunResult r = run(cli, "validate --only 3");
    check(r.code == 0, "validate --only 3 exits 0");
    check(contains(r.out, "PASS"), "criterion 3 passes");
  }

  std::printf("%d checks, %d failed\n", n_checks, n_failed);
  return n_failed;
}
