#include <gtest/gtest.h>

#include <app.hpp>
#include <cli_main.hpp>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace decim;
using namespace decim::app;
using std::numbers::pi;

namespace {
int run_cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr)
{
    args.insert(args.begin(), "decim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

std::filesystem::path scratch(const std::string& name)
{
    auto d = std::filesystem::temp_directory_path() / "decim_cli_tests";
    std::filesystem::create_directories(d);
    return d / name;
}
}  // namespace

struct PresetCase {
    const char* name;
    double epsilon, phi, gamma, pump, pump_nn;
    bool mirrored;
};

class PresetParams : public ::testing::TestWithParam<PresetCase> {};

TEST_P(PresetParams, MatchPresetParameters)
{
    const auto& e = GetParam();
    const auto c = preset_config(e.name);
    EXPECT_DOUBLE_EQ(c.params.t_c, 1.0);
    EXPECT_DOUBLE_EQ(c.params.epsilon, e.epsilon);
    EXPECT_DOUBLE_EQ(c.params.phi, e.phi);
    EXPECT_DOUBLE_EQ(c.params.gamma, e.gamma);
    EXPECT_DOUBLE_EQ(c.params.pump, e.pump);
    EXPECT_DOUBLE_EQ(c.params.pump_nn, e.pump_nn);
    EXPECT_EQ(c.params.mirrored, e.mirrored);
    EXPECT_NO_THROW(validate(c));
}

INSTANTIATE_TEST_SUITE_P(
    Presets, PresetParams,
    ::testing::Values(PresetCase{"fig2", -0.2, 0.0, 0.1, 0.05, 0.0, false},
                      PresetCase{"fig3", 0.0, 0.0, 0.0, 0.0, 0.0, false},
                      PresetCase{"fig5", 0.1, 0.9 * pi / 2, 3.0, 3.0, 1.5, false},
                      PresetCase{"fig6", 0.0, pi / 2, 2.0, 4.0, 2.0, false},
                      PresetCase{"fig7", 0.1, 0.0, 0.5, 0.0, 0.0, false},
                      PresetCase{"fig8", 0.0, pi / 2, 2.0, 1.4, 0.7, false},
                      PresetCase{"fig9", 0.0, pi / 2, 2.0, 1.4, 0.7, false},
                      PresetCase{"fig10", 0.0, pi / 2, 4.0, 3.6, 1.8, true}),
    [](const auto& info) { return std::string(info.param.name); });

TEST(Cli, PresetGridsAndSites)
{
    EXPECT_EQ(preset_config("fig2").n_sites, 400);
    EXPECT_EQ(preset_config("fig5").n_sites, 45);
    EXPECT_EQ(preset_config("fig5").pairs, (std::vector<std::pair<int, int>>{{5, 4}}));
    EXPECT_EQ(preset_config("fig7").n_sites, 15);
    EXPECT_EQ(preset_config("fig9").n_sites, 40);
    EXPECT_THROW(preset_config("fig11"), UsageError);
    EXPECT_TRUE(is_preset("fig10"));
    EXPECT_FALSE(is_preset("gf"));
}

TEST(Cli, EmptyGridIsUsageError)
{
    std::string err;
    EXPECT_EQ(run_cli({"gf", "--omega-min", "1", "--omega-max", "1"}, nullptr, &err), exit_usage);
    EXPECT_NE(err.find("omega"), std::string::npos);
}

TEST(Cli, ZeroRepetitionsIsUsageError)
{
    EXPECT_EQ(run_cli({"bench", "--reps", "0"}), exit_usage);
}

TEST(Cli, UnknownFlagIsUsageError)
{
    EXPECT_EQ(run_cli({"gf", "--frobnicate", "3"}), exit_usage);
    EXPECT_EQ(run_cli({}), exit_usage);
}

TEST(Cli, BadPairIsUsageError)
{
    EXPECT_EQ(run_cli({"gf", "--pairs", "3-4"}), exit_usage);
}

TEST(Cli, DenseResolventAtEigenvalueIsNumericalError)
{
    // Hermitian 3-site chain has an eigenvalue at 0.
    std::string err;
    const int code = run_cli({"gf", "--method", "dense", "--n-sites", "3", "--pairs", "0:0", "--omega-min", "-1",
                              "--omega-max", "1", "--omega-points", "3", "--gamma", "0", "--pump", "0"},
                             nullptr, &err);
    EXPECT_EQ(code, exit_numerical);
    EXPECT_NE(err.find("numerical error"), std::string::npos);
}

TEST(Cli, OutputIsDeterministic)
{
    std::string a, b;
    const std::vector<std::string> args{"gf", "--omega-points", "21", "--gamma", "2", "--pump", "1.4",
                                        "--phi",  "1.5707963267948966", "--hatano-nelson", "--threads", "3"};
    ASSERT_EQ(run_cli(args, &a), exit_ok);
    ASSERT_EQ(run_cli(args, &b), exit_ok);
    EXPECT_EQ(a, b);
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 22);
}

TEST(Cli, WritesDataAndSidecar)
{
    const auto path = scratch("xi.csv");
    std::filesystem::remove(path);
    ASSERT_EQ(run_cli({"xi", "--omega-points", "5", "--out", path.string()}), exit_ok);
    EXPECT_TRUE(std::filesystem::exists(path));
    std::ifstream meta(path.string() + ".meta.json");
    ASSERT_TRUE(meta.good());
    const auto j = json::parse(meta);
    EXPECT_EQ(j.at("config").at("subcommand"), "xi");
    EXPECT_TRUE(j.contains("created"));
}

TEST(Cli, JsonFormat)
{
    std::string out;
    ASSERT_EQ(run_cli({"winding", "--omega-points", "4", "--format", "json", "--gamma", "2", "--pump", "4",
                       "--phi", "1.5707963267948966", "--hatano-nelson"},
                      &out),
              exit_ok);
    const auto j = json::parse(out);
    EXPECT_EQ(j.at("rows").size(), 4u);
}

TEST(Cli, JsonConfigInUnitsOfCoupling)
{
    const auto path = scratch("cfg.json");
    {
        std::ofstream f(path);
        f << R"({"params": {"units": "t_c", "t_c": 2.0, "gamma": 0.5, "pump": 0.25, "epsilon": 0.1},
                 "omega_points": 3})";
    }
    RunConfig c;
    c.subcommand = "gf";
    std::ifstream in(path);
    apply_json_config(c, json::parse(in));
    EXPECT_DOUBLE_EQ(c.params.t_c, 2.0);
    EXPECT_DOUBLE_EQ(c.params.gamma, 1.0);
    EXPECT_DOUBLE_EQ(c.params.pump, 0.5);
    EXPECT_DOUBLE_EQ(c.params.epsilon, 0.2);
    EXPECT_EQ(c.omega_points, 3);
    EXPECT_EQ(run_cli({"gf", "--config", path.string()}), exit_ok);
}

TEST(Cli, UnknownConfigKeyRejected)
{
    RunConfig c;
    EXPECT_THROW(apply_json_config(c, json{{"omgea", 1.0}}), UsageError);
    EXPECT_THROW(apply_json_config(c, json{{"omega", "zero"}}), UsageError);
}

TEST(Cli, CommandLineValuesAreInUnitsOfCoupling)
{
    std::string a, b;
    ASSERT_EQ(run_cli({"gf", "--omega-points", "3", "--tc", "2", "--gamma", "0.5"}, &a), exit_ok);
    ASSERT_EQ(run_cli({"gf", "--omega-points", "3", "--tc", "1", "--gamma", "0.5"}, &b), exit_ok);
    // G t_c is dimensionless, so both runs produce identical tables.
    EXPECT_EQ(a, b);
}

TEST(Cli, BenchmarkSmallSizes)
{
    const auto rep = run_benchmark(ChainParams::coupled_cavity(0.0, 1.0, 0.5, 0.0), {8, 16}, 2, 0.0);
    ASSERT_EQ(rep.rows.size(), 2u);
    for (const auto& r : rep.rows) EXPECT_LT(r.max_rel_error, 1e-10);
}

TEST(Cli, TablePathsForMultipleTables)
{
    Table t{"semi", {}, {}, {}};
    EXPECT_EQ(table_path("out/fig5.csv", t, 1), std::filesystem::path("out/fig5.csv"));
    EXPECT_EQ(table_path("out/fig5.csv", t, 2), std::filesystem::path("out/fig5_semi.csv"));
}
