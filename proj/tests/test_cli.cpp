#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "thetaforge/cli.hpp"
#include "thetaforge/curve_io.hpp"
#include "thetaforge/error.hpp"
#include "thetaforge/theta.hpp"

using namespace thetaforge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = execute(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("thetaforge_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

struct EnvGuard {
  std::string name;
  std::optional<std::string> saved;
  explicit EnvGuard(std::string n) : name(std::move(n)) {
    if (const char* v = std::getenv(name.c_str())) saved = v;
  }
  ~EnvGuard() {
    if (saved) setenv(name.c_str(), saved->c_str(), 1);
    else unsetenv(name.c_str());
  }
};

std::size_t file_count(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::recursive_directory_iterator(dir)) n += e.is_regular_file();
  return n;
}

}  // namespace

TEST_CASE("complex parsing") {
  CHECK(parse_complex("1i") == cplx(0, 1));
  CHECK(parse_complex("-2") == cplx(-2, 0));
  CHECK(parse_complex("0.5+1i") == cplx(0.5, 1));
  CHECK(parse_complex("3-0.25i") == cplx(3, -0.25));
  CHECK(parse_complex("i") == cplx(0, 1));
  CHECK(parse_complex("-i") == cplx(0, -1));
  CHECK(parse_complex("+2") == cplx(2, 0));
  CHECK(parse_complex("1e-3+2e+1i") == cplx(1e-3, 20));
  CHECK_THROWS_AS(parse_complex("abc"), Error);
  CHECK_THROWS_AS(parse_complex(""), Error);
  const auto m = parse_complex_matrix("1i, 0.5; 0.5, 2i");
  CHECK(m.rows() == 2);
  CHECK(m(1, 0) == cplx(0.5, 0));
  CHECK(m(1, 1) == cplx(0, 2));
  CHECK_THROWS_AS(parse_complex_matrix("1i, 0; 1i"), Error);
  CHECK(parse_complex_vector("0.1, 0.2+0.3i").size() == 2);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"curve", "gen", "--genus", "0"}).code == exit_code::usage);
  CHECK(run({"curve", "gen", "--genus", "5"}).code == exit_code::usage);
  CHECK(run({}).code == exit_code::usage);
  CHECK(run({"bogus"}).code == exit_code::usage);
  CHECK(run({"curve"}).code == exit_code::usage);
  CHECK(run({"verify", "jacobi", "--eps", "1e-14"}).code == exit_code::usage);
  CHECK(run({"verify", "jacobi", "--eps", "0.01"}).code == exit_code::usage);
  CHECK(run({"verify", "jacobi", "--tau", "nonsense"}).code == exit_code::usage);
  CHECK(run({"verify", "thm2", "--tau", "1i", "--sigma", "1,2,2,4"}).code == exit_code::usage);
  CHECK(run({"verify", "thm1", "--genus", "2", "--no-cache", "--variant", "iv"}).code ==
        exit_code::usage);
  CHECK(run({"curve", "show", "--curve", "/nonexistent/curve.json"}).code == exit_code::usage);
  CHECK(run({"suite", "--genus-min", "3", "--genus-max", "2", "--no-cache"}).code == exit_code::usage);
  const auto r = run({"curve", "gen", "--genus", "0"});
  CHECK(r.err.find("genus") != std::string::npos);
  CHECK(run({"--help"}).code == exit_code::ok);
}

TEST_CASE("verify jacobi") {
  const auto r = run({"verify", "jacobi", "--tau", "1i", "--json", "-"});
  CHECK(r.code == exit_code::ok);
  CHECK(r.out.find("PASS") != std::string::npos);
  const auto j = json::parse(r.out.substr(r.out.find('{')));
  CHECK(parse_double(j.at("rel_residual").get<std::string>()) <= 1e-9);
  CHECK(j.at("sign") == -1);
  CHECK(j.at("pass") == true);
  CHECK(run({"verify", "jacobi", "--tau", "0.3+0.7i"}).code == exit_code::ok);
  CHECK(run({"verify", "jacobi", "--threshold", "0", "--tau", "-0.25+0.6i"}).code ==
        exit_code::verification_failed);
}

TEST_CASE("curve files through the command line") {
  TempDir dir("curve");
  const auto r = run({"curve", "gen", "--genus", "3", "--seed", "5"});
  CHECK(r.code == exit_code::ok);
  CHECK(r.out == curve_to_json(random_curve(3, 5)));
  CHECK(run({"curve", "gen", "--genus", "3", "--seed", "5", "--json", dir / "c.json"}).code == 0);
  CHECK(read_file(dir / "c.json") == r.out);
  const auto show = run({"curve", "show", "--curve", dir / "c.json"});
  CHECK(show.code == exit_code::ok);
  CHECK(show.out.find(curve_hash(random_curve(3, 5))) != std::string::npos);
}

TEST_CASE("theta output round-trips at 17 digits") {
  const auto r = run({"theta", "--tau", "0.1+1.1i, 0.2+0.3i; 0.2+0.3i, -0.1+0.9i", "--char",
                      "1/2,0;1/2,1/2", "--z", "0.1+0.05i, -0.2", "--order", "2", "--json", "-"});
  REQUIRE(r.code == exit_code::ok);
  const auto j = json::parse(r.out.substr(r.out.find('{')));
  const PeriodMatrix tau(parse_complex_matrix("0.1+1.1i, 0.2+0.3i; 0.2+0.3i, -0.1+0.9i"));
  const auto jet = theta_jet(tau, parse_characteristic("1/2,0;1/2,1/2"),
                             parse_complex_vector("0.1+0.05i, -0.2"), 1e-12, 2);
  CHECK(parse_double(j.at("value").at("re").get<std::string>()) == jet.value.real());
  CHECK(parse_double(j.at("value").at("im").get<std::string>()) == jet.value.imag());
  CHECK(parse_double(j.at("gradient").at(1).at("im").get<std::string>()) == jet.gradient(1).imag());
  CHECK(parse_double(j.at("hessian").at(0).at(1).at("re").get<std::string>()) ==
        jet.hessian(0, 1).real());
  CHECK(run({"theta", "--tau", "1i", "--order", "3"}).code == exit_code::usage);
  CHECK(run({"theta", "--tau", "1i", "--z", "0,0"}).code == exit_code::usage);
}

TEST_CASE("period cache: miss then identical hit") {
  TempDir dir("periods");
  const std::vector<std::string> args = {"periods", "--genus", "3", "--seed", "4", "--cache-dir",
                                         dir.path.string(), "--json", "-"};
  const auto cold = run(args);
  const auto warm = run(args);
  REQUIRE(cold.code == exit_code::ok);
  REQUIRE(warm.code == exit_code::ok);
  CHECK(cold.out.find("cache miss") != std::string::npos);
  CHECK(warm.out.find("cache hit") != std::string::npos);
  CHECK(cold.out.substr(cold.out.find('\n')) == warm.out.substr(warm.out.find('\n')));
  CHECK(file_count(dir.path) == 1);
  const auto off = run({"periods", "--genus", "3", "--seed", "4", "--no-cache"});
  CHECK(off.out.find("cache off") != std::string::npos);
}

TEST_CASE("cache directory precedence") {
  EnvGuard env("THETAFORGE_CACHE_DIR");
  EnvGuard home("HOME");
  TempDir from_env("env"), from_flag("flag"), from_home("home");
  setenv("THETAFORGE_CACHE_DIR", from_env.path.string().c_str(), 1);
  setenv("HOME", from_home.path.string().c_str(), 1);

  CHECK(run({"periods", "--genus", "1", "--seed", "3"}).code == 0);
  CHECK(file_count(from_env.path) == 1);
  CHECK(run({"periods", "--genus", "1", "--seed", "3", "--cache-dir", from_flag.path.string()}).code == 0);
  CHECK(file_count(from_flag.path) == 1);
  unsetenv("THETAFORGE_CACHE_DIR");
  CHECK(run({"periods", "--genus", "1", "--seed", "3"}).code == 0);
  CHECK(file_count(from_home.path / ".cache" / "thetaforge") == 1);
  CHECK(file_count(from_env.path) == 1);
}

TEST_CASE("point identities from the command line") {
  for (const char* which : {"thm1", "normed"})
    for (const char* v : {"i", "ii", "iii"})
      CHECK(run({"verify", which, "--genus", "2", "--seed", "3", "--variant", v, "--no-cache"}).code ==
            exit_code::ok);
  CHECK(run({"verify", "cor", "--genus", "3", "--seed", "3", "--no-cache"}).code == exit_code::ok);
  CHECK(run({"verify", "thm2", "--genus", "3", "--sigma", "8,1,2,7,3,6,4,5", "--no-cache"}).code ==
        exit_code::ok);
  CHECK(run({"verify", "thm2", "--tau", "1i", "--sigma", "2,3,4,1"}).code == exit_code::ok);
  CHECK(run({"verify", "rosenhain", "--seed", "9", "--no-cache"}).code == exit_code::ok);
}

TEST_CASE("suite reports are byte-identical per seed") {
  TempDir dir("suite");
  const std::vector<std::string> base = {"suite", "--genus-max", "2", "--seed", "7", "--no-cache"};
  auto a_args = base;
  a_args.insert(a_args.end(), {"--json", dir / "a.json"});
  auto b_args = base;
  b_args.insert(b_args.end(), {"--json", dir / "b.json"});
  const auto a = run(a_args);
  const auto b = run(b_args);
  CHECK(a.code == exit_code::ok);
  CHECK(b.code == exit_code::ok);
  CHECK(a.out == b.out);
  const std::string ja = read_file(dir / "a.json");
  CHECK(ja == read_file(dir / "b.json"));
  const auto doc = json::parse(ja);
  CHECK(doc.at("pass") == true);
  CHECK(doc.at("config").at("seed") == 7);

  auto z = base;
  z.insert(z.end(), {"--threshold", "0"});
  CHECK(run(z).code == exit_code::verification_failed);
}

TEST_CASE("suite with a cache matches the uncached run") {
  TempDir dir("suite_cache");
  const std::vector<std::string> base = {"suite", "--genus-max", "2", "--seed", "11", "--json", "-"};
  auto cached = base;
  cached.insert(cached.end(), {"--cache-dir", dir.path.string()});
  auto uncached = base;
  uncached.push_back("--no-cache");
  const auto cold = run(cached);
  const auto warm = run(cached);
  const auto plain = run(uncached);
  CHECK(cold.out == warm.out);
  CHECK(cold.out == plain.out);
}
