#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "kdl_app/commands.hpp"

namespace fs = std::filesystem;
using kdl::app::Options;

namespace {

fs::path config(const std::string& name) { return fs::path(KDL_CONFIG_DIR) / (name + ".json"); }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("kdl_unit_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

int run(const std::string& command, Options options) {
    std::ostringstream out;
    std::ostringstream err;
    return kdl::app::run_command(command, options, out, err);
}

Options with(const std::string& name, const fs::path& out) {
    Options o;
    o.config = config(name).string();
    o.out = out.string();
    o.jobs = 1;
    return o;
}

}  // namespace

TEST(Cli, ValidateExitCodes) {
    const auto dir = scratch("validate");
    EXPECT_EQ(run("validate", with("canonical_n1", dir)), kdl::app::kExitOk);
    EXPECT_EQ(run("validate", with("positive_b", dir)), kdl::app::kExitRefuted);
    EXPECT_EQ(run("validate", with("cos_f", dir)), kdl::app::kExitRefuted);
    EXPECT_TRUE(fs::exists(dir / "validate.json"));
}

TEST(Cli, FlaggedGapExitsTwo) {
    const auto dir = scratch("gap");
    EXPECT_EQ(run("gap", with("zero_f", dir)), kdl::app::kExitRefuted);
    std::ifstream in(dir / "gap.json");
    const auto doc = nlohmann::json::parse(in);
    EXPECT_TRUE(doc.at("gap").at("flagged").get<bool>());
}

TEST(Cli, BadInputs) {
    const auto dir = scratch("bad");
    Options missing = with("canonical_n1", dir);
    missing.config = (dir / "does_not_exist.json").string();
    EXPECT_EQ(run("validate", missing), kdl::app::kExitRefuted);

    fs::create_directories(dir);
    std::ofstream(dir / "broken.json") << R"json({"problem": {"n": 1, "K": "2*t - 1", "f": "1/(1+t^2)", "g": "0", "r": 1, "q": 0}})json";
    Options broken = with("canonical_n1", dir);
    broken.config = (dir / "broken.json").string();
    EXPECT_EQ(run("validate", broken), kdl::app::kExitRefuted);

    Options points = with("canonical_n1", dir);
    points.points_per_dim = 0;
    EXPECT_EQ(run("landscape", points), kdl::app::kExitRefuted);

    EXPECT_EQ(run("no_such_command", with("canonical_n1", dir)), kdl::app::kExitRefuted);
}

TEST(Cli, SolveThenCertify) {
    const auto dir = scratch("solve");
    ASSERT_EQ(run("solve", with("canonical_n1", dir)), kdl::app::kExitOk);
    std::ifstream in(dir / "certificate.json");
    const auto cert = nlohmann::json::parse(in);
    for (const char* key : {"problem", "constants", "gap", "mu_tilde", "solutions", "residual_max", "seed",
                            "config_hash"}) {
        EXPECT_TRUE(cert.contains(key)) << key;
    }
    ASSERT_EQ(cert.at("solutions").size(), 3U);
    for (const auto& s : cert.at("solutions")) {
        EXPECT_TRUE(s.contains("x") && s.contains("J") && s.contains("grad_norm"));
    }
    EXPECT_EQ(run("certify", with("canonical_n1", dir)), kdl::app::kExitOk);

    // a certificate for a different config is rejected
    EXPECT_NE(run("certify", [&] {
                  Options o = with("canonical_n2", dir);
                  o.input = (dir / "certificate.json").string();
                  return o;
              }()),
              kdl::app::kExitOk);
}

TEST(Cli, LandscapeRows) {
    const auto dir = scratch("landscape");
    Options o = with("canonical_n2", dir);
    o.points_per_dim = 9;
    ASSERT_EQ(run("landscape", o), kdl::app::kExitOk);
    std::ifstream in(dir / "landscape.csv");
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    EXPECT_EQ(lines, 1 + 81);
}
