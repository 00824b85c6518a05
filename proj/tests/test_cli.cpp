#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "cyclix/arith.hpp"
#include "cyclix/curve.hpp"
#include "cyclix/density.hpp"
#include "cyclix/galois2.hpp"
#include "cyclix/survey.hpp"

using namespace cyclix;
using nlohmann::ordered_json;

namespace {

namespace fs = std::filesystem;

std::string scratch_dir() {
    static std::string dir = [] {
        auto p = fs::temp_directory_path() / "cyclix_cli_test";
        fs::remove_all(p);
        fs::create_directories(p);
        return p.string();
    }();
    return dir;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int code = -1;
    std::string out, err;
};

// drive the real binary through the shell, capturing both streams
RunResult run_cli(const std::string& args, const std::string& env = "") {
    static int seq = 0;
    std::string tag = scratch_dir() + "/run" + std::to_string(seq++);
    std::string cmd = env + (env.empty() ? "" : " ") + "\"" CYCLIX_BIN "\" " +
                      args + " > " + tag + ".out 2> " + tag + ".err";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(tag + ".out");
    r.err = slurp(tag + ".err");
    return r;
}

ordered_json json_of(const RunResult& r) {
    REQUIRE(r.code == 0);
    ordered_json j = ordered_json::parse(r.out, nullptr, false);
    REQUIRE(!j.is_discarded());
    return j;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("usage and argument errors exit 64") {
    CHECK(run_cli("").code == 64);
    CHECK(run_cli("frobnicate").code == 64);
    CHECK(run_cli("gate --curve 1,4,4 --nope 3").code == 64);
    CHECK(run_cli("gate --curve 1,4,4 --f").code == 64);
    CHECK(run_cli("gate --curve 1,4,4 --f abc").code == 64);
    CHECK(run_cli("gate stray").code == 64);

    RunResult help = run_cli("help");
    CHECK(help.code == 0);
    for (const char* cmd : {"analyze", "gate", "density", "gd", "find-b",
                            "survey", "verify", "h"})
        CHECK(help.out.find(cmd) != std::string::npos);
}

TEST_CASE("precondition and unsupported exits") {
    RunResult r = run_cli("gate --curve 1,4,4 --f 4 --a 2");
    CHECK(r.code == 2);
    CHECK(r.err.find("gcd") != std::string::npos);

    CHECK(run_cli("gate --f 4 --a 1").code == 2);        // no curve
    CHECK(run_cli("gate --curve 1,4 --f 1 --a 1").code == 2);
    CHECK(run_cli("h").code == 2);                       // no n
    CHECK(run_cli("h --n 0").code == 2);
    CHECK(run_cli("density --curve 0,0,-2").code == 2);  // CM model
    CHECK(run_cli("survey --curve 1,4,4").code == 2);    // no x

    // profile arithmetic overflows for this wide model
    CHECK(run_cli("analyze --curve 1,1250003,0").code == 3);
    CHECK(run_cli("density --curve 1,1250003,0").code == 3);
}

TEST_CASE("gate subcommand matches the library") {
    RunResult r = run_cli("gate --curve 1,4,4 --f 4 --a 1 --json");
    ordered_json j = json_of(r);
    CHECK(j["schema"] == "cyclix/1");
    CHECK(j["kind"] == "gate");
    CHECK(j["model_id"] == "1,4,4");
    CHECK(j["verdict"] == "FinitelyMany");

    GateResult g = cyclicity_gate(CurveModel{1, 4, 4}, 4, 1);
    CHECK(j["verdict"] == verdict_name(g.verdict));
    CHECK(j["reasons"].get<std::vector<std::string>>() == g.reasons);

    // the table is a view of the same result value
    RunResult table = run_cli("gate --curve 1,4,4 --f 4 --a 1");
    CHECK(table.code == 0);
    CHECK(table.out.find(verdict_name(g.verdict)) != std::string::npos);
    for (const std::string& reason : g.reasons)
        CHECK(table.out.find(reason) != std::string::npos);

    ordered_json j2 = json_of(run_cli("gate --curve 1,4,4 --f 4 --a 3 --json"));
    CHECK(j2["verdict"] == "InfinitelyManyUnconditional");
}

TEST_CASE("h subcommand") {
    ordered_json j = json_of(run_cli("h --n 49 --json"));
    CHECK(j["n"] == 49);
    CHECK(j["h"] == 9);
    CHECK(j["h"] == h_function(49));

    RunResult table = run_cli("h --n 49");
    CHECK(table.out.find("9") != std::string::npos);
}

TEST_CASE("gd subcommand") {
    ordered_json j = json_of(run_cli("gd --D 7 --f 15 --a 2 --json"));
    CHECK(j["kind"] == "gd");
    CHECK(j["count"] == gd_count(7, 15, 2));
    CHECK(j["bound"] == gd_bound(7, 15));
    CHECK(j["within"] == true);
    CHECK(j["count"].get<i64>() <= j["bound"].get<i64>());

    CHECK(run_cli("gd --f 15 --a 2").code == 2);  // no D
}

TEST_CASE("analyze subcommand") {
    CurveModel brau{1, 4, 4};
    CurveProfile pr = make_profile(brau);
    ordered_json j = json_of(run_cli("analyze --curve 1,4,4 --json"));
    CHECK(j["kind"] == "analyze");
    CHECK(j["disc_g"] == disc_g(brau));
    CHECK(j["disc_E"] == disc_E(brau));
    CHECK(j["k2"]["kind"] == "Quadratic");
    CHECK(j["k2"]["f2"] == 4);
    CHECK(j["k2"]["D"] == -1);
    CHECK(j["k2"]["d2"] == -4);
    CHECK(j["ent_mod"] == pr.ent_mod);
    CHECK(j["j_invariant"] == pr.j.get_str());
    CHECK(j["cm"] == false);
    CHECK(!j.contains("cm_D"));

    ordered_json cm = json_of(run_cli("analyze --curve 0,0,-2 --json"));
    CHECK(cm["cm"] == true);
    CHECK(cm["cm_D"] == 3);
    CHECK(cm["cm_maximal"] == true);

    // the override flows through to the profile
    ordered_json wide = json_of(run_cli("analyze --curve 1,4,4 --me 210 --json"));
    CHECK(wide["ent_mod"] == 210);
}

TEST_CASE("density subcommand serializes the exact estimate") {
    CurveProfile pr = make_profile(CurveModel{1, 4, 4});
    DensityEstimate est = delta_noncm(pr, 4, 3, 200);

    ordered_json j = json_of(run_cli("density --curve 1,4,4 --f 4 --a 3 --json"));
    const ordered_json& d = j["density"];
    CHECK(d["model_id"] == "1,4,4");
    CHECK(d["Y"] == 200);
    CHECK(mpq_class(d["value_lo"].get<std::string>()) == est.value_lo);
    CHECK(mpq_class(d["value_hi"].get<std::string>()) == est.value_hi);
    CHECK(mpq_class(d["tail"].get<std::string>()) == est.tail);
    CHECK(d["gamma_trace"].size() == est.gamma_trace.size());
    CHECK(j["approx_lo"].get<double>() == doctest::Approx(est.value_lo.get_d()));
    CHECK(j["approx_hi"].get<double>() == doctest::Approx(est.value_hi.get_d()));

    // the whole object is byte-identical to the library serializer
    CHECK(d.dump(2) == density_json_text(est));

    ordered_json y100 = json_of(run_cli("density --curve 1,4,4 --y 100 --json"));
    CHECK(y100["density"]["Y"] == 100);
}

TEST_CASE("find-b subcommand") {
    ordered_json j = json_of(run_cli("find-b --curve 1,4,4 --json"));
    CHECK(j["f2"] == 4);
    CHECK(j["b"] == 3);

    // f2 = 21 quadratic layer: b = 5 mod 7 is the exceptional class
    ordered_json exc = json_of(run_cli("find-b --curve 1,-5,0 --m 7 --a 5 --json"));
    CHECK(exc["f2"] == 21);
    CHECK(exc["exceptional"] == true);
    CHECK(!exc.contains("b"));

    ordered_json ok = json_of(run_cli("find-b --curve 1,-5,0 --m 7 --a 2 --json"));
    CHECK(ok["exceptional"] == false);
    TwoTorsionField k2 = classify_k2(CurveModel{1, -5, 0});
    CongruentB want = find_b_congruent(k2, 7, 2);
    CHECK(ok["b"] == want.b);
    CHECK(ok["b"].get<i64>() % 7 == 2);

    CHECK(run_cli("find-b --curve 0,-1,0").code == 2);  // trivial K2
}

TEST_CASE("survey subcommand reproduces the library report") {
    CurveModel brau{1, 4, 4};
    SurveyReport want = run_survey(brau, 4, 3, 20000);

    ordered_json j = json_of(run_cli("survey --curve 1,4,4 --f 4 --a 3 --x 20000 --json"));
    CHECK(j["kind"] == "survey");
    CHECK(j["pi_ap"] == want.pi_ap);
    CHECK(j["pi_cyclic"] == want.pi_cyclic);
    CHECK(j["pi_ap_half"] == want.pi_ap_half);
    CHECK(j["ratio"].get<double>() == doctest::Approx(want.ratio));
    CHECK(j["gate"]["verdict"] == verdict_name(want.gate.verdict));
    CHECK(!j.contains("density"));
    CHECK(!j.contains("detail"));

    // byte parity with the library serializer for the summary shape
    CHECK(j.dump(2) == report_json_text(want));

    SUBCASE("worker flag and env agree") {
        ordered_json w1 = json_of(run_cli(
            "survey --curve 1,4,4 --f 4 --a 3 --x 20000 --workers 1 --json"));
        ordered_json we = json_of(
            run_cli("survey --curve 1,4,4 --f 4 --a 3 --x 20000 --json",
                    "CYCLIX_WORKERS=3"));
        CHECK(w1 == j);
        CHECK(we == j);
    }

    SUBCASE("artifacts land under the output dir") {
        std::string dir = scratch_dir() + "/artifacts";
        RunResult r = run_cli("survey --curve 1,4,4 --f 4 --a 3 --x 20000"
                              " --density --csv rows.csv --out sum.json"
                              " --checkpoint ck.json --output-dir " + dir);
        CHECK(r.code == 0);
        CHECK(r.out.find("rows (use --json or --csv)") != std::string::npos);

        // csv implies detail; first data row is the first good prime
        std::string csv = slurp(dir + "/rows.csv");
        CHECK(csv.rfind("p,N,a_p,d1,d2,cyclic\n", 0) == 0);
        GroupStructure g3 = group_structure(brau, 3);
        std::string row = std::to_string(g3.p) + "," + std::to_string(g3.N);
        CHECK(csv.find("\n" + row + ",") != std::string::npos);

        SurveyReport back = import_json(dir + "/sum.json");
        CHECK(back.pi_ap == want.pi_ap);
        CHECK(back.pi_cyclic == want.pi_cyclic);
        CHECK(back.has_density);
        CHECK(back.has_detail);

        // the checkpoint is consumed by the successful run
        CHECK(!fs::exists(dir + "/ck.json"));
    }
}

TEST_CASE("verify subcommand") {
    ordered_json j = json_of(
        run_cli("verify --curve 1,4,4 --f 4 --a 1 --x 10000 --json"));
    CHECK(j["kind"] == "verify");
    CHECK(j["cutoff"] == 100);
    CHECK(j["cyclic_beyond_cutoff"].empty());
    CHECK(j["unexpected"].empty());
    CHECK(j["clean"] == true);

    ordered_json decl = json_of(run_cli(
        "verify --curve 1,4,4 --f 4 --a 1 --x 10000 --exceptional 41,17 --json"));
    CHECK(decl["declared"] == ordered_json({17, 41}));
    CHECK(decl["clean"] == true);

    // an unconditional-infinitude class is not a finiteness claim
    CHECK(run_cli("verify --curve 1,4,4 --f 4 --a 3 --x 5000").code == 2);
}

TEST_CASE("config file defaults with flag overrides") {
    std::string cfg = scratch_dir() + "/gate.cfg";
    {
        std::ofstream out(cfg);
        out << "# obstructed Brau class\n"
               "curve = 1,4,4\n"
               "f = 4\n"
               "a = 1\n";
    }
    ordered_json base = json_of(run_cli("gate --config " + cfg + " --json"));
    CHECK(base["verdict"] == "FinitelyMany");

    ordered_json flipped =
        json_of(run_cli("gate --config " + cfg + " --a 3 --json"));
    CHECK(flipped["verdict"] == "InfinitelyManyUnconditional");

    std::string bad = scratch_dir() + "/bad.cfg";
    {
        std::ofstream out(bad);
        out << "curve = 1,4,4\nwhat = 7\n";
    }
    RunResult r = run_cli("gate --config " + bad);
    CHECK(r.code == 2);
    CHECK(r.err.find("what") != std::string::npos);

    std::string gcd_cfg = scratch_dir() + "/gcd.cfg";
    {
        std::ofstream out(gcd_cfg);
        out << "curve = 1,4,4\nf = 4\na = 2\n";
    }
    CHECK(run_cli("gate --config " + gcd_cfg).code == 2);
    CHECK(run_cli("gate --config " + scratch_dir() + "/missing.cfg").code == 2);
}

TEST_SUITE_END();
