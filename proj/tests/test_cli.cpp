#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "zpcover/family.hpp"

#ifndef ZPCOVER_CLI_PATH
#error "ZPCOVER_CLI_PATH must point at the built CLI binary"
#endif

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const std::string outfile = "/tmp/zpcover_cli_out_" + std::to_string(counter++) + ".txt";
    const std::string cmd = std::string(ZPCOVER_CLI_PATH) + " " + args + " >" + outfile + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(raw);
    r.out = slurp(outfile);
    std::remove(outfile.c_str());
    return r;
}

std::string tmp_path(const std::string& name) { return "/tmp/zpcover_test_" + name; }

}  // namespace

TEST_CASE("construct base-p writes a verified zpcf with stats sidecar") {
    const std::string out = tmp_path("base.zpcf");
    const auto r = run_cli("construct base-p --p 3 --n 9 --out " + out);
    INFO(r.out);
    REQUIRE(r.exit_code == 0);
    const auto fam = zpcover::read_family(out);
    CHECK(fam.length() == 6);
    CHECK(fam.size() == 9);
    CHECK(slurp(out + ".json").find("\"is_covering\": true") != std::string::npos);

    SECTION("verify accepts it against Zp") {
        const auto v = run_cli("verify --family " + out + " --s Zp");
        CHECK(v.exit_code == 0);
    }
    SECTION("verify with a custom comma list") {
        const auto v = run_cli("verify --family " + out + " --s 1,2");
        CHECK(v.exit_code == 0);
    }
}

TEST_CASE("construct aa matches the desk-scale reference") {
    const std::string out = tmp_path("aa.zpcf");
    const auto r = run_cli("construct aa --p 3 --ell0 2 --m 2 --zmax 1 --out " + out);
    INFO(r.out);
    REQUIRE(r.exit_code == 0);
    const auto fam = zpcover::read_family(out);
    CHECK(fam.modulus() == 3);
    CHECK(fam.length() == 3);
    CHECK(fam.size() == 2);
}

TEST_CASE("verify rejects a non-covering family with exit 2") {
    const std::string path = tmp_path("bad.zpcf");
    {
        std::ofstream os(path);
        os << "# zpcf v1\np=3 l=2 n=2 s=Zp\n0 1\n0 2\n";
    }
    const auto r = run_cli("verify --family " + path);
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("NOT covering") != std::string::npos);
    CHECK(r.out.find("misses 1") != std::string::npos);
}

TEST_CASE("usage and parse errors exit 1") {
    CHECK(run_cli("construct base-p --n 9 --out /tmp/x.zpcf").exit_code == 1);  // missing --p
    CHECK(run_cli("bogus-subcommand").exit_code == 1);
    const std::string path = tmp_path("malformed.zpcf");
    {
        std::ofstream os(path);
        os << "# zpcf v1\np=3 l=2 n=2 s=Zp\n0 3\n0 2\n";
    }
    const auto r = run_cli("verify --family " + path);
    CHECK(r.exit_code == 1);
    CHECK(r.out.find(":3:") != std::string::npos);  // line-numbered message
}

TEST_CASE("pipeline construct is byte-deterministic for a fixed seed") {
    const std::string a = tmp_path("pipe_a.zpcf");
    const std::string b = tmp_path("pipe_b.zpcf");
    REQUIRE(run_cli("construct pipeline --p 7 --n 9 --k 3 --seed 42 --out " + a).exit_code == 0);
    REQUIRE(run_cli("construct pipeline --p 7 --n 9 --k 3 --seed 42 --out " + b).exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a + ".json") == slurp(b + ".json"));
    CHECK(!slurp(a).empty());
    SECTION("the product verifies as Zp-covering") {
        CHECK(run_cli("verify --family " + a + " --s Zp").exit_code == 0);
    }
}

TEST_CASE("lift subcommand") {
    const std::string src = tmp_path("lift_src.zpcf");
    const std::string dst = tmp_path("lift_dst.zpcf");
    REQUIRE(run_cli("construct base-p --p 3 --n 9 --out " + src).exit_code == 0);
    const auto r = run_cli("lift --family " + src + " --p 7 --out " + dst);
    INFO(r.out);
    REQUIRE(r.exit_code == 0);
    const auto fam = zpcover::read_family(dst);
    CHECK(fam.modulus() == 7);
    CHECK(fam.length() == 24);  // 2 * 6 * ceil(log2 3)
    CHECK(run_cli("verify --family " + dst + " --s 0,1,2").exit_code == 0);
}

TEST_CASE("scale-set subcommand") {
    const auto r = run_cli("scale-set --p 7 --k 4 --seed 9 --format json");
    INFO(r.out);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("\"valid\": true") != std::string::npos);
    SECTION("deterministic given the seed") {
        const auto r2 = run_cli("scale-set --p 7 --k 4 --seed 9 --format json");
        CHECK(r.out == r2.out);
    }
}

TEST_CASE("boost subcommand") {
    const std::string src = tmp_path("boost_src.zpcf");
    REQUIRE(run_cli("construct base-p --p 3 --n 3 --out " + src).exit_code == 0);
    SECTION("concat") {
        const std::string dst = tmp_path("boost_cat.zpcf");
        REQUIRE(run_cli("boost --family " + src + " --concat 2 --out " + dst).exit_code == 0);
        const auto fam = zpcover::read_family(dst);
        CHECK(fam.size() == 9);
        CHECK(fam.length() == 6);
    }
    SECTION("scale") {
        const std::string dst = tmp_path("boost_scale.zpcf");
        REQUIRE(run_cli("boost --family " + src + " --scale 2 --out " + dst).exit_code == 0);
        const auto fam = zpcover::read_family(dst);
        CHECK(fam.length() == 6);
        CHECK(fam.size() == 3);
    }
    SECTION("concat and scale are mutually exclusive") {
        CHECK(run_cli("boost --family " + src + " --concat 2 --scale 2 --out /tmp/x.zpcf")
                  .exit_code == 1);
    }
}

TEST_CASE("certify and matroids flow") {
    const std::string fam = tmp_path("cert_fam.zpcf");
    const std::string cert = tmp_path("cert.json");
    const std::string mat = tmp_path("matroids.json");
    REQUIRE(run_cli("construct base-p --p 3 --n 9 --out " + fam).exit_code == 0);
    const auto rc = run_cli("certify --family " + fam + " --r 2 --out " + cert);
    INFO(rc.out);
    REQUIRE(rc.exit_code == 0);
    const auto rm = run_cli("matroids --cert " + cert + " --check exhaustive --out " + mat);
    INFO(rm.out);
    REQUIRE(rm.exit_code == 0);
    CHECK(slurp(mat).find("\"hyperedges\"") != std::string::npos);
}

TEST_CASE("prophet subcommand prints the gap table") {
    const auto r = run_cli("prophet --p 3 --r 27");
    INFO(r.out);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    CHECK(r.out.find("2.638737") != std::string::npos);
    SECTION("json format") {
        const auto j = run_cli("prophet --p 3 --r 27 --format json");
        CHECK(j.out.find("\"bounds_pass\": true") != std::string::npos);
    }
}

TEST_CASE("bounds subcommand prints the three-line table") {
    const auto r = run_cli("bounds --p 7 --log2n 10");
    INFO(r.out);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("lower          7") != std::string::npos);
    CHECK(r.out.find("upper_trivial  28") != std::string::npos);
    CHECK(r.out.find("upper_pipeline 560") != std::string::npos);
}
