#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "entrokit/cli.hpp"
#include "entrokit/config.hpp"
#include "entrokit/model_io.hpp"
#include "entrokit/report.hpp"

namespace fs = std::filesystem;
using namespace entrokit::cli;
using nlohmann::json;

namespace {

const fs::path kData = ENTROKIT_DATA_DIR;

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Run r;
    r.code = dispatch(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string model(const std::string& name) { return (kData / "models" / (name + ".json")).string(); }

class Sandbox : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("entrokit_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        previous_ = fs::current_path();
        fs::current_path(dir_);
    }
    void TearDown() override {
        fs::current_path(previous_);
        fs::remove_all(dir_);
        unsetenv("ENTROKIT_THREADS");
    }
    fs::path path(const std::string& name) const { return dir_ / name; }
    void put(const std::string& name, const std::string& bytes) const { write_file(path(name), bytes); }

    std::set<std::string> listing() const {
        std::set<std::string> files;
        for (const auto& e : fs::recursive_directory_iterator(dir_)) {
            if (e.is_regular_file()) files.insert(fs::relative(e.path(), dir_).string());
        }
        return files;
    }

    fs::path dir_;
    fs::path previous_;
};

}  // namespace

TEST(Cli, EntropyPrintsBits) {
    const auto r = run({"entropy", "--model", model("bern25")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("0.811278"), std::string::npos) << r.out;
    const auto s = run({"entropy", "--model", model("symmetric01")});
    EXPECT_NE(s.out.find("0.468996"), std::string::npos) << s.out;
    EXPECT_EQ(run({"entropy", "--model", model("hmm2")}).code, 2);
}

TEST(Cli, UsageErrors) {
    auto r = run({"entropy", "--bogus"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--model"), std::string::npos) << r.err;
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"entropy", "--model", "/nonexistent/model.json"}).code, 2);
}

TEST(Cli, Selftest) {
    const auto r = run({"selftest"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}

TEST(Cli, ExitCodeMapping) {
    using entrokit::ErrorKind;
    EXPECT_EQ(exit_code_for(ErrorKind::Validation), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::Corrupt), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::GuardExceeded), 3);
    EXPECT_EQ(exit_code_for(ErrorKind::TooLarge), 3);
    EXPECT_EQ(exit_code_for(ErrorKind::Infeasible), 3);
    EXPECT_EQ(exit_code_for(ErrorKind::NoDecay), 3);
}

TEST_F(Sandbox, DecodeGarbage) {
    put("garbage.bin", std::string("\xde\xad\xbe\xef", 4));
    const auto r = run({"decode", "--in", path("garbage.bin").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("Corrupt"), std::string::npos) << r.err;
}

TEST_F(Sandbox, EncodeDecodeRoundTrip) {
    put("bits.txt", "0100110001110101\n");
    ASSERT_EQ(run({"encode", "--in", "bits.txt", "--m", "1", "--out", "bits.bin"}).code, 0);
    auto r = run({"decode", "--in", "bits.bin"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "0100110001110101\n");

    put("abc.txt", "abccabbbacab\n");
    ASSERT_EQ(run({"encode", "--in", "abc.txt", "--alphabet", "a,b,c", "--m", "1", "--out", "abc.bin"}).code, 0);
    r = run({"decode", "--in", "abc.bin", "--alphabet", "a,b,c"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "abccabbbacab\n");

    put("words.txt", "sun\nrain\nsun\nfog\nrain\n");
    ASSERT_EQ(run({"encode", "--in", "words.txt", "--alphabet", "sun,rain,fog", "--m", "0", "--out", "w.bin"}).code, 0);
    ASSERT_EQ(run({"decode", "--in", "w.bin", "--alphabet", "sun,rain,fog", "--out", "w.txt"}).code, 0);
    EXPECT_EQ(read_file(path("w.txt")), "sun\nrain\nsun\nfog\nrain\n");
}

TEST_F(Sandbox, EncodeGuard) {
    put("bits.txt", std::string(64, '1') + "\n");
    EXPECT_EQ(run({"encode", "--in", "bits.txt", "--m", "40", "--out", "x.bin"}).code, 3);
    EXPECT_EQ(run({"encode", "--in", "bits.txt", "--alphabet", "a,b", "--out", "x.bin"}).code, 2);
}

TEST(Config, Defaults) {
    const auto r = validate_config("concentration", json::object());
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.normalized["eta"], 0.1);
    EXPECT_EQ(r.normalized["tol"], 1e-14);
    EXPECT_EQ(r.normalized["k_start"], 0);
}

TEST(Config, Errors) {
    auto r = validate_config("example1", json{{"epsilon", 0.2}});
    ASSERT_FALSE(r.ok());
    EXPECT_NE(r.errors.front().find("epsilon must lie in (0, 1/6)"), std::string::npos) << r.errors.front();
    EXPECT_EQ(r.errors.front().rfind("/epsilon", 0), 0U);
    r = validate_config("clt", json{{"seed", -3}});
    ASSERT_FALSE(r.ok());
    EXPECT_NE(r.errors.front().find("/seed"), std::string::npos);
    r = validate_config("clt", json{{"colour", "blue"}});
    ASSERT_FALSE(r.ok());
    EXPECT_NE(r.errors.front().find("unknown key"), std::string::npos);
    EXPECT_FALSE(validate_config("concentration", json{{"eta", 0.5}}).ok());
    EXPECT_FALSE(validate_config("concentration", json{{"k_start", 2}}).ok());
    EXPECT_FALSE(validate_config("clt", json{{"n_grid", json::array()}}).ok());
}

TEST(ModelIo, KeyedTransitions) {
    const json doc{{"type", "markov"},
                   {"alphabet", {"a", "b"}},
                   {"order", 1},
                   {"transitions", {{"a", {0.9, 0.1}}, {"b", {0.2, 0.8}}}}};
    const auto lm = parse_model(doc, "x");
    ASSERT_NE(lm.markov(), nullptr);
    EXPECT_DOUBLE_EQ(lm.markov()->prob(1, 0), 0.2);
    json bad = doc;
    bad["transitions"]["b"] = {0.5, 0.6};
    try {
        parse_model(bad);
        FAIL();
    } catch (const entrokit::Error& e) {
        EXPECT_NE(std::string(e.what()).find("transitions"), std::string::npos) << e.what();
    }
    json extra = doc;
    extra["colour"] = 1;
    EXPECT_THROW(parse_model(extra), entrokit::Error);
}

TEST_F(Sandbox, ValidateOnlyAndConfigErrors) {
    auto r = run({"concentration", "--validate-only"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["eta"], 0.1);
    put("bad.json", R"({"epsilon": 0.2})");
    r = run({"example1", "--config", "bad.json", "--out", "o"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("epsilon must lie in (0, 1/6)"), std::string::npos) << r.err;
    put("neg.json", R"({"seed": -1})");
    EXPECT_EQ(run({"clt", "--model", model("bern25"), "--config", "neg.json", "--out", "o"}).code, 2);
    EXPECT_FALSE(fs::exists(path("o")));
}

TEST_F(Sandbox, ExperimentReplayAndThreads) {
    setenv("ENTROKIT_THREADS", "1", 1);
    auto r = run({"clt", "--model", model("symmetric01"), "--n", "256", "512", "--reps", "30", "--seed", "4", "--out", "a"});
    ASSERT_EQ(r.code, 0) << r.err;
    setenv("ENTROKIT_THREADS", "3", 1);
    r = run({"clt", "--manifest", "a/manifest.json", "--out", "b"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"samples.csv", "summary.csv"}) {
        EXPECT_EQ(read_file(path("a") / f), read_file(path("b") / f)) << f;
    }
    EXPECT_NE(run({"clt", "--manifest", "a/manifest.json", "--seed", "5", "--out", "c"}).code, 0);

    // Manifest digests describe the emitted files.
    const auto manifest = json::parse(read_file(path("a") / "manifest.json"));
    ASSERT_TRUE(manifest.contains("outputs"));
    for (const auto& entry : manifest["outputs"]) {
        const auto bytes = read_file(path("a") / entry["file"].get<std::string>());
        EXPECT_EQ(entry["sha256"], sha256_hex(bytes));
    }
    EXPECT_EQ(manifest["model_digest"], sha256_hex(read_file(model("symmetric01"))));
}

TEST_F(Sandbox, ConcentrationAndExample1Outputs) {
    auto r = run({"concentration", "--model", model("symmetric01"), "--n", "1024", "--reps", "50", "--out", "conc"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(path("conc") / "constants.json"));
    const auto summary = read_file(path("conc") / "summary.csv");
    EXPECT_EQ(summary.rfind("t,exceed,tail", 0), 0U) << summary;

    r = run({"example1", "--n", "256", "512", "--reps", "5", "--out", "ex"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto manifest = json::parse(read_file(path("ex") / "manifest.json"));
    EXPECT_TRUE(manifest.contains("truncated_mass"));
    EXPECT_TRUE(manifest.contains("tail_cap"));

    r = run({"example1", "--manifest", "ex/manifest.json", "--out", "ex2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_file(path("ex") / "samples.csv"), read_file(path("ex2") / "samples.csv"));
}

TEST_F(Sandbox, WritesStayUnderOut) {
    put("bits.txt", "0110100110010110\n");
    const auto before = listing();
    const std::vector<std::vector<std::string>> commands{
        {"clt", "--model", model("bern25"), "--n", "128", "--reps", "5", "--out", "out/clt"},
        {"concentration", "--model", model("symmetric01"), "--n", "256", "--reps", "5", "--out", "out/conc"},
        {"example1", "--n", "128", "--reps", "3", "--out", "out/ex"},
        {"mixing", "--model", model("symmetric01"), "--max-gap", "10", "--out", "out/mix.json"},
        {"stability", "--model", model("symmetric01"), "--out", "out/stab.json"},
        {"encode", "--in", "bits.txt", "--m", "1", "--out", "out/bits.bin"},
        {"entropy", "--model", model("bern25")},
        {"sigma", "--model", model("bern25")},
        {"conditions", "--model", model("symmetric01")},
    };
    for (const auto& args : commands) {
        const auto r = run(args);
        EXPECT_EQ(r.code, 0) << args.front() << ": " << r.err;
    }
    for (const auto& f : listing()) {
        if (before.count(f)) continue;
        EXPECT_EQ(f.rfind("out/", 0), 0U) << f;
    }
}

TEST(Cli, AnalyticsCommands) {
    auto r = run({"stability", "--model", model("symmetric01")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto consts = json::parse(r.out);
    EXPECT_NEAR(consts["M"].get<double>(), 2 * std::log2(9.0), 1e-9);
    EXPECT_NEAR(consts["Delta_thm"].get<double>(), 61.0, 1e-9);

    r = run({"mixing", "--model", model("symmetric01"), "--max-gap", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto profile = json::parse(r.out);
    EXPECT_NEAR(profile["phi"][1].get<double>(), 0.4, 1e-12);
    EXPECT_EQ(run({"mixing", "--model", model("example1")}).code, 2);

    r = run({"conditions", "--model", model("example1"), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["status"], "not applicable");
    r = run({"conditions", "--model", model("symmetric01"), "--json"});
    EXPECT_EQ(json::parse(r.out)["status"], "satisfied");

    r = run({"sigma", "--model", model("bern25"), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["sigma2"].get<double>(), 0.1875 * std::log2(3.0) * std::log2(3.0), 1e-12);
}
