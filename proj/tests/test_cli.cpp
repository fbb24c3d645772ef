#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "qcap/cli.hpp"

using namespace qcap;

namespace {

std::string fixture(const std::string& name) { return std::string(QCAP_FIXTURE_DIR) + "/" + name; }

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run qcap_run(std::vector<std::string> args) {
  args.insert(args.begin(), "qcap");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

io::json report(const Run& r) { return io::json::parse(r.out); }

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("qcap_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("parse errors carry file, line and pointer") {
    const io::Source src("{\n  \"schema\": 1,\n  \"dim_in\": 2,\n  \"dim_out\": 2,\n  \"kraus\": [\n    [[1, 0], [0, \"x\"]]\n  ]\n}",
                         "bad.json");
    try {
      io::parse_channel(src);
      FAIL("expected a schema error");
    } catch (const io::SchemaError& e) {
      CHECK(std::string(e.what()).find("bad.json:6: /kraus/0/1/1") == 0);
    }

    const io::Source missing("{\n  \"schema\": 1,\n  \"kraus\": []\n}", "m.json");
    CHECK_THROWS_WITH_AS(io::parse_channel(missing), doctest::Contains("dim_in"), io::SchemaError);

    CHECK_THROWS_WITH_AS(io::Source("{\n\"schema\": 1,\n", "t.json"), doctest::Contains("t.json:3"), io::SchemaError);
    CHECK_THROWS_WITH_AS(io::parse_hamiltonian(io::Source("{\"schema\": 2, \"matrix\": [[1]]}", "v.json")),
                         doctest::Contains("unsupported schema version"), io::SchemaError);
    CHECK_THROWS_AS(io::parse_hamiltonian(io::Source("{\"matrix\": [[1]]}", "n.json")), io::SchemaError);
  }

  TEST_CASE("library validation errors are located") {
    const io::Source src("{\n  \"schema\": 1,\n  \"dim_in\": 2,\n  \"dim_out\": 2,\n  \"kraus\": [\n    [[1, 0], [0, 0.5]]\n  ]\n}",
                         "ntp.json");
    CHECK_THROWS_WITH_AS(io::parse_channel(src), doctest::Contains("ntp.json:5: /kraus: channel is not trace preserving"),
                         io::SchemaError);
    const io::Source shape("{\"schema\": 1, \"dim_in\": 3, \"dim_out\": 2, \"kraus\": [[[1, 0], [0, 1]]]}", "s.json");
    CHECK_THROWS_WITH_AS(io::parse_channel(shape), doctest::Contains("/kraus/0"), io::SchemaError);
  }

  TEST_CASE("fixtures round trip") {
    const KrausChannel pi = io::parse_channel(io::Source::from_file(fixture("dephasing.json")));
    CHECK(channels_equal(pi, KrausChannel::dephasing(2), 1e-14));
    const io::Source again(io::to_json(pi).dump(), "again");
    CHECK(channels_equal(io::parse_channel(again), pi, 1e-14));

    const Ensemble mu = io::parse_ensemble(io::Source::from_file(fixture("plus_zero.json")));
    CHECK(std::abs(chi_quantity(mu) - th::oracle_chi(th::plus_zero())) < 1e-12);
    const Ensemble mu2 = io::parse_ensemble(io::Source(io::to_json(mu).dump(), "mu"));
    CHECK(std::abs(chi_quantity(mu2) - chi_quantity(mu)) < 1e-14);

    const Matrix c = io::parse_matrix(io::Node(io::Source("[[1, [0, 2]], [[0, -2], 3]]", "c")));
    CHECK(c(0, 1) == Complex(0, 2));
    CHECK(c(1, 0) == Complex(0, -2));

    CHECK(channels_equal(io::channel_from_argument("cq", 0), io::parse_channel(io::Source::from_file(fixture("cq_orthogonal.json"))), 1e-12));
    CHECK(io::channel_from_argument("identity:3", 0).dim_in() == 3);
    CHECK(channels_equal(io::channel_from_argument("random:2:3:2", 5), io::channel_from_argument("random:2:3:2", 5), 0.0));
    CHECK_THROWS_AS(io::channel_from_argument("random:2:3", 0), ValidationError);
    CHECK_THROWS_AS(io::channel_from_argument("identity:x", 0), ValidationError);
    CHECK_THROWS_AS(io::channel_from_argument("/no/such/file.json", 0), ValidationError);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("disturbance report") {
    const Run r = qcap_run({"disturbance", "--channel", fixture("dephasing.json"), "--ensemble", fixture("plus_zero.json")});
    CHECK(r.code == 0);
    const io::json j = report(r);
    const double expected = th::oracle_chi(th::plus_zero()) - th::oracle_chi_image(KrausChannel::dephasing(2), th::plus_zero());
    CHECK(std::abs(j["result"]["value"].get<double>() - expected) < 1e-9);
    CHECK(j["schema"] == 1);
    CHECK(j["unit"] == "nats");
    CHECK(j["tolerances"]["eig"] == 1e-12);
    CHECK(j["inputs"]["channel"]["source"] == fixture("dephasing.json"));
    CHECK(j["inputs"]["ensemble"]["value"]["members"].size() == 2);
  }

  TEST_CASE("bits and csv") {
    const Run nats = qcap_run({"entropy", "--state", fixture("mixed_qubit.json")});
    const Run bits = qcap_run({"entropy", "--state", fixture("mixed_qubit.json"), "--unit", "bits"});
    const double n = report(nats)["result"]["entropy"];
    const double b = report(bits)["result"]["entropy"];
    CHECK(std::abs(b - n / std::log(2.0)) < 1e-14);
    CHECK(std::abs(n - oracle::entropy_of({0.7, 0.3})) < 1e-12);

    const Run csv = qcap_run({"sweep-truncation", "--ensemble", fixture("bipartite_2x3.json"), "--dims", "2,3",
                              "--ranks", "1,2,3", "--format", "csv"});
    CHECK(csv.code == 0);
    CHECK(csv.out.rfind("n,dim,chi_n,chi_limit,residual\n", 0) == 0);
    CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 4);
  }

  TEST_CASE("gibbs") {
    const Run r = qcap_run({"gibbs", "--hamiltonian", fixture("diag01.json"), "--energy", "0.2"});
    CHECK(r.code == 0);
    CHECK(std::abs(report(r)["result"]["multiplier"].get<double>() - std::log(4.0)) < 1e-8);
    const Run slack = qcap_run({"gibbs", "--hamiltonian", fixture("diag01.json"), "--energy", "0.5"});
    CHECK(report(slack)["result"]["multiplier"].get<double>() == 0.0);
  }

  TEST_CASE("reports are byte identical") {
    const std::vector<std::string> args = {"chi-capacity", "--channel", "random:2:2:2", "--hamiltonian",
                                           fixture("hadamard.json"), "--energy", "0.3", "--seed", "4",
                                           "--restarts", "3"};
    const Run a = qcap_run(args);
    const Run b = qcap_run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(report(a)["result"]["certificate"]["passed"] == true);
  }

  TEST_CASE("selftest") {
    const Run r = qcap_run({"selftest"});
    CHECK(r.code == 0);
    CHECK(report(r)["result"]["passed"] == true);
  }

  TEST_CASE("exit codes") {
    CHECK(qcap_run({"disturbance", "--ensemble", fixture("plus_zero.json")}).code == cli::kExitValidation);
    CHECK(qcap_run({"entropy", "--state", "/no/such.json"}).code == cli::kExitValidation);
    CHECK(qcap_run({"gibbs", "--hamiltonian", fixture("diag01.json"), "--energy", "0"}).code == cli::kExitValidation);
    CHECK(qcap_run({"gibbs", "--hamiltonian", fixture("diag01.json"), "--energy", "0.2", "--tol", "bogus=1"}).code ==
          cli::kExitValidation);
    CHECK(qcap_run({"entropy", "--state", fixture("mixed_qubit.json"), "--unit", "furlongs"}).code == cli::kExitValidation);
    CHECK(qcap_run({}).code == cli::kExitValidation);
    const Run bad = qcap_run({"coherent-info", "--channel", "identity", "--state", fixture("mixed_qubit.json"),
                              "--degrading", "dephasing"});
    CHECK(bad.code == cli::kExitValidation);
    CHECK(bad.err.find("degrading map") != std::string::npos);

    const std::string cfg = temp_file("short.json", "{\"schema\": 1, \"optimizer\": {\"max_iterations\": 1}}");
    const Run capped = qcap_run({"ea-capacity", "--channel", "random:2:2:2", "--hamiltonian", fixture("hadamard.json"),
                                 "--energy", "0.3", "--config", cfg});
    CHECK(capped.code == cli::kExitNotConverged);
    CHECK(report(capped)["result"]["converged"] == false);
  }

  TEST_CASE("config file and overrides") {
    const std::string cfg =
        temp_file("tol.json", "{\n  \"schema\": 1,\n  \"numerics\": {\"tolerances\": {\"cert\": 1e-7, \"psd\": 1e-8}}\n}");
    ::setenv(cli::kConfigEnv, cfg.c_str(), 1);
    const Run env = qcap_run({"entropy", "--state", fixture("mixed_qubit.json")});
    const Run flag = qcap_run({"entropy", "--state", fixture("mixed_qubit.json"), "--tol", "cert=1e-5"});
    ::unsetenv(cli::kConfigEnv);
    CHECK(report(env)["tolerances"]["cert"] == 1e-7);
    CHECK(report(env)["tolerances"]["psd"] == 1e-8);
    CHECK(report(flag)["tolerances"]["cert"] == 1e-5);
    CHECK(report(flag)["tolerances"]["psd"] == 1e-8);

    const std::string bad = temp_file("badtol.json", "{\n  \"schema\": 1,\n  \"numerics\": {\"tolerances\": {\n    \"nope\": 1}}\n}");
    const Run r = qcap_run({"entropy", "--state", fixture("mixed_qubit.json"), "--config", bad});
    CHECK(r.code == cli::kExitValidation);
    CHECK(r.err.find(":4:") != std::string::npos);
  }

  TEST_CASE("report file") {
    const auto path = std::filesystem::temp_directory_path() / "qcap_test_report.json";
    std::filesystem::remove(path);
    const Run r = qcap_run({"gaussian-classify", "--gaussian", fixture("attenuator.json"), "--out", path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    const io::json j = io::json::parse(f);
    CHECK(j["result"]["verdict"] == "gap>0 guaranteed");
  }

  TEST_CASE("gap command on the rotated Hamiltonian") {
    const Run r = qcap_run({"gap", "--channel", "dephasing", "--hamiltonian", fixture("hadamard.json"), "--energy", "0.2",
                            "--restarts", "4"});
    CHECK(r.code == 0);
    const io::json j = report(r)["result"];
    CHECK(j["gap"].get<double>() >= 0.01);
    CHECK(j["verdict"] == "gap>0 guaranteed");
  }
}
