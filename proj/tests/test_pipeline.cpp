// test_pipeline.cpp - configuration handling, stage orchestration, artifact determinism
#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "dicke/config.hpp"
#include "dicke/digest.hpp"
#include "dicke/pipeline.hpp"

using namespace dicke;
namespace fs = std::filesystem;

namespace {

RunConfig mini_config(const std::string& out_dir) {
    RunConfig c;
    c.model = ModelParams{1.0, 1.0, 0.5, 4.0, 1};
    c.basis = BasisKind::fock;
    c.analysis = {0.0, 0.6};
    c.extra_windows = {{-1.0, 0.2}};
    c.histogram_bins = 10;
    c.surrogate_levels = 2000;
    c.grid_eps = {0.0};
    c.grid_n = 17;
    c.grid_span = 2.0;
    c.lyapunov_time = 250.0;
    c.ode_tol = 1e-10;
    c.poincare_orbits = 2;
    c.poincare_time = 150.0;
    c.moments = {1.0, 2.0};
    c.field_states = {0, 3};
    c.ensembles = {{2.0, 3.0}, {4.0}};
    c.scan = {-0.9, -0.8, 0.7, 0.8, 0.1, 1.0};
    c.seed = 11;
    c.out_dir = out_dir;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// relative path -> content for every file under a run directory, except the
// manifest whose wall-clock entries legitimately differ between runs
std::map<std::string, std::string> collect_artifacts(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), root).string();
        if (rel == "manifest.json") continue;
        out[rel] = slurp(entry.path());
    }
    return out;
}

}  // namespace

TEST_CASE("checksum helpers") {
    CHECK(fnv1a("") == fnv_offset);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hex64(0x1) == "0000000000000001");
    CHECK(hex64(0xaf63dc4c8601ec8cull) == "af63dc4c8601ec8c");

    const fs::path tmp = fs::temp_directory_path() / "dicke_digest_probe.txt";
    std::ofstream(tmp) << "abc";
    CHECK(file_digest(tmp.string()) == fnv1a("abc"));
    fs::remove(tmp);
    CHECK_THROWS(file_digest(tmp.string()));
}

TEST_CASE("stage names parse") {
    CHECK(parse_stage("spectrum") == Stage::spectrum);
    CHECK(parse_stage("classical") == Stage::classical);
    CHECK(parse_stage("stats") == Stage::stats);
    CHECK(parse_stage("husimi") == Stage::husimi);
    CHECK(parse_stage("mixed") == Stage::mixed);
    CHECK(parse_stage("all") == Stage::all);
    CHECK_THROWS_AS(parse_stage("bogus"), ConfigError);
}

TEST_CASE("presets are valid and distinct") {
    const RunConfig a = preset_config("one-photon-paper");
    CHECK(a.model.f == 1);
    CHECK(a.model.gamma == doctest::Approx(0.5));
    CHECK(a.model.j == doctest::Approx(50.0));
    CHECK(a.basis == BasisKind::displaced);
    CHECK(a.ensembles.size() == 2);
    CHECK_NOTHROW(a.validate());

    const RunConfig b = preset_config("two-photon-paper");
    CHECK(b.model.f == 2);
    CHECK(b.model.omega0 == doctest::Approx(2.0));
    CHECK(b.model.gamma == doctest::Approx(0.3));
    CHECK(b.basis == BasisKind::fock);
    CHECK(b.analysis.center == doctest::Approx(1.0));
    CHECK_NOTHROW(b.validate());

    CHECK_THROWS_AS(preset_config("three-photon-paper"), ConfigError);
}

TEST_CASE("configuration json round trips exactly") {
    for (const char* name : {"one-photon-paper", "two-photon-paper"}) {
        const RunConfig c = preset_config(name);
        const std::string text = dump_config(c);
        const RunConfig back = parse_config(text);
        CHECK(dump_config(back) == text);
    }
    const RunConfig mini = mini_config("somewhere");
    CHECK(dump_config(parse_config(dump_config(mini))) == dump_config(mini));
}

TEST_CASE("strict parsing rejects junk") {
    CHECK_THROWS_AS(parse_config("{nope"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"omega": 1.0, "bogus": 2}})"), ConfigError);
    try {
        parse_config(R"({"model": {"bogus": 2}})");
        FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("model.bogus") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(R"({"classical": {"grid_m": 5}})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/dicke.json"), ConfigError);

    RunConfig c = mini_config("x");
    c.workers = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = mini_config("x");
    c.surrogate_levels = 50;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = mini_config("x");
    c.histogram_bins = 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = mini_config("x");
    c.bands = {0.7, -0.8};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = mini_config("x");
    c.seed = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = mini_config("x");
    c.basis = BasisKind::displaced;
    c.model.f = 2;
    c.model.gamma = 0.3;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = mini_config("x");
    c.out_dir.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("pipeline runs end to end and resumes without rework") {
    const fs::path root = fs::temp_directory_path() / "dicke_pipe_a";
    fs::remove_all(root);
    const RunConfig cfg = mini_config(root.string());

    run_pipeline(cfg, Stage::all);

    // manifest lists every artifact with a digest that matches the bytes
    const auto manifest = nlohmann::json::parse(slurp(root / "manifest.json"));
    CHECK(manifest.at("tool_version").get<std::string>() == tool_version);
    CHECK(manifest.at("config_digest").get<std::string>().size() == 16);
    const auto& stages = manifest.at("stages");
    std::map<std::string, long> wall_before;
    for (const char* name : {"spectrum", "classical", "stats", "husimi", "mixed"}) {
        REQUIRE(stages.contains(name));
        CHECK(stages.at(name).at("completed").get<bool>());
        wall_before[name] = stages.at(name).at("wall_ms").get<long>();
        for (const auto& rel : stages.at(name).at("artifacts")) {
            const fs::path p = root / rel.get<std::string>();
            REQUIRE_MESSAGE(fs::exists(p), rel.get<std::string>());
            const auto digest = manifest.at("files").at(rel.get<std::string>());
            CHECK(hex64(file_digest(p.string())) == digest.get<std::string>());
        }
    }

    // expected artifact families
    CHECK(fs::exists(root / "classical_f1_e+0.000.csv"));
    CHECK(fs::exists(root / "classical_f1_e+0.000.json"));
    CHECK(fs::exists(root / "poincare_f1_e+0.000.csv"));
    CHECK(fs::exists(root / "mixed_series.csv"));
    CHECK(fs::exists(root / "mixed_fits.json"));
    CHECK(fs::exists(root / "mixed_scan.csv"));
    CHECK(fs::exists(root / "profile_f1_j4.csv"));
    CHECK(fs::exists(root / "field_f1_j4_k0_nu1.csv"));
    CHECK(fs::exists(root / "field_f1_j4_k3_nu2.json"));
    CHECK(fs::exists(root / "cache" / "mtable_f1_j4_w+0.000_h0.600.json"));

    // the narrow low window has too few levels: marked skipped, still written
    const auto skipped = nlohmann::json::parse(slurp(root / "stats_f1_j4_w-1.000_h0.200.json"));
    CHECK(skipped.at("skipped").get<bool>());
    const auto good = nlohmann::json::parse(slurp(root / "stats_f1_j4_w+0.000_h0.600.json"));
    CHECK(!good.at("skipped").get<bool>());
    CHECK(good.at("n").get<long>() >= 20);
    CHECK(good.at("mean_r").get<double>() > 0.0);
    CHECK(!good.at("A2_surrogate").is_null());

    // a resumed run leaves every stage untouched
    run_pipeline(cfg, Stage::all, true);
    const auto manifest2 = nlohmann::json::parse(slurp(root / "manifest.json"));
    for (const auto& [name, wall] : wall_before)
        CHECK(manifest2.at("stages").at(name).at("wall_ms").get<long>() == wall);

    // deleting an artifact forces only that stage to redo its work
    fs::remove(root / "mixed_scan.csv");
    run_pipeline(cfg, Stage::all, true);
    CHECK(fs::exists(root / "mixed_scan.csv"));
    const auto manifest3 = nlohmann::json::parse(slurp(root / "manifest.json"));
    CHECK(manifest3.at("stages").at("classical").at("wall_ms").get<long>() ==
          wall_before["classical"]);
    fs::remove_all(root);
}

TEST_CASE("artifacts are byte-identical across worker counts") {
    const fs::path ra = fs::temp_directory_path() / "dicke_pipe_w1";
    const fs::path rb = fs::temp_directory_path() / "dicke_pipe_w4";
    fs::remove_all(ra);
    fs::remove_all(rb);

    RunConfig a = mini_config(ra.string());
    a.workers = 1;
    RunConfig b = mini_config(rb.string());
    b.workers = 4;
    run_pipeline(a, Stage::all);
    run_pipeline(b, Stage::all);

    const auto fa = collect_artifacts(ra);
    const auto fb = collect_artifacts(rb);
    REQUIRE(!fa.empty());
    REQUIRE(fa.size() == fb.size());
    for (const auto& [rel, bytes] : fa) {
        REQUIRE_MESSAGE(fb.count(rel) == 1, rel);
        CHECK_MESSAGE(fb.at(rel) == bytes, rel);
    }

    // worker count and output location do not enter the canonical digest
    const auto ma = nlohmann::json::parse(slurp(ra / "manifest.json"));
    const auto mb = nlohmann::json::parse(slurp(rb / "manifest.json"));
    CHECK(ma.at("config_digest") == mb.at("config_digest"));

    fs::remove_all(ra);
    fs::remove_all(rb);
}

TEST_CASE("consumer stages demand their producers") {
    const fs::path root = fs::temp_directory_path() / "dicke_pipe_dep";
    fs::remove_all(root);
    const RunConfig cfg = mini_config(root.string());

    CHECK_THROWS_AS(run_pipeline(cfg, Stage::stats), DependencyError);
    CHECK_THROWS_AS(run_pipeline(cfg, Stage::husimi), DependencyError);
    CHECK_THROWS_AS(run_pipeline(cfg, Stage::mixed), DependencyError);

    run_pipeline(cfg, Stage::spectrum);
    CHECK_THROWS_AS(run_pipeline(cfg, Stage::husimi), DependencyError);  // still no map
    run_pipeline(cfg, Stage::classical);
    CHECK_NOTHROW(run_pipeline(cfg, Stage::husimi));
    CHECK_NOTHROW(run_pipeline(cfg, Stage::mixed));
    fs::remove_all(root);
}

TEST_CASE("impossible requests fail as configuration errors") {
    // shell energy below the classical minimum
    const fs::path root = fs::temp_directory_path() / "dicke_pipe_bad";
    fs::remove_all(root);
    RunConfig low = mini_config(root.string());
    low.grid_eps = {-5.0};
    CHECK_THROWS_AS(run_pipeline(low, Stage::classical), ConfigError);

    // a classical map too far from the analysis window to serve it
    RunConfig far = mini_config(root.string());
    far.grid_eps = {1.5};
    far.poincare_orbits = 0;
    run_pipeline(far, Stage::spectrum);
    run_pipeline(far, Stage::classical);
    CHECK_THROWS_AS(run_pipeline(far, Stage::husimi), ConfigError);

    // mixed stage without ensembles is a configuration hole
    RunConfig none = mini_config(root.string());
    none.ensembles.clear();
    CHECK_THROWS_AS(run_pipeline(none, Stage::mixed), ConfigError);
    fs::remove_all(root);
}
