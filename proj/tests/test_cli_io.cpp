#include <catch2/catch_amalgamated.hpp>

#include <extremal_rays/experiment.hpp>

#include <filesystem>

using namespace extremal_rays;
using Catch::Approx;
namespace fs = std::filesystem;

TEST_CASE("domain JSON round trip preserves dyadic coordinates") {
    SlitDomain dn = build_slit_rectangle(Dyadic(1), Dyadic(1), Dyadic(1, 1), 4);
    json j = to_json(dn);
    SlitDomain back = domain_from_json(j);
    REQUIRE(back.slits().size() == dn.slits().size());
    for (size_t i = 0; i < dn.slits().size(); ++i) {
        CHECK(back.slits()[i].a == dn.slits()[i].a);
        CHECK(back.slits()[i].b == dn.slits()[i].b);
    }
    CHECK(back.area() == dn.area());
}

TEST_CASE("qd JSON round trip") {
    PolynomialQD p({Complex(0.5, -0.25), Complex(0, 0), Complex(1, 0)});
    PolynomialQD back = qd_from_json(to_json(p));
    REQUIRE(back.coeffs().size() == p.coeffs().size());
    for (size_t i = 0; i < p.coeffs().size(); ++i) CHECK(back.coeffs()[i] == p.coeffs()[i]);
}

TEST_CASE("modulus result JSON fields") {
    ModulusResult m;
    m.value = 1.0;
    m.h = 0.25;
    m.extrapolated = 1.01;
    m.error_bar = 0.02;
    json j = to_json(m);
    CHECK(j.at("value") == 1.0);
    CHECK(j.at("reciprocity_gap").is_null());
    m.reciprocity_gap = 0.003;
    CHECK(to_json(m).at("reciprocity_gap") == 0.003);
}

TEST_CASE("eps schedule parsing") {
    auto sched = parse_eps_schedule("2^-1..2^-4");
    REQUIRE(sched.size() == 4);
    CHECK(sched[0] == Dyadic(1, 1));
    CHECK(sched[3] == Dyadic(1, 4));
    auto listed = parse_eps_schedule("1/2,1/8");
    REQUIRE(listed.size() == 2);
    CHECK(listed[1] == Dyadic(1, 3));
    CHECK_THROWS_AS(parse_eps_schedule("2^-4..2^-1"), invalid_parameter);
}

TEST_CASE("config file parsing") {
    std::string path = (fs::temp_directory_path() / "er_config_test.toml").string();
    write_file(path,
               "# comment\nkind = modulus\nbuiltin = \"square\"\nh = \"1/64\"\n"
               "e = left\nf = right\nthreads = 2\n");
    auto kv = parse_config_file(path);
    CHECK(kv.at("kind") == "modulus");
    CHECK(kv.at("builtin") == "square");
    CHECK(kv.at("h") == "1/64");
    CHECK(kv.at("threads") == "2");
    fs::remove(path);
}

TEST_CASE("named sets resolve for builtins") {
    ExperimentConfig cfg;
    cfg.params["builtin"] = "lshape";
    NamedDomain nd = builtin_domain(cfg);
    BoundarySet top = named_set(nd, "top");
    CHECK(top.pieces().size() == 2);  // both top-facing edges
    BoundarySet bottom = named_set(nd, "bottom");
    CHECK(vertical_family_modulus(nd.dom, bottom, top) == 1.5);
    CHECK_THROWS_AS(named_set(nd, "nonsense"), invalid_parameter);
}

TEST_CASE("modulus experiment writes deterministic artifacts") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::modulus;
    cfg.params = {{"builtin", "square"}, {"e", "left"}, {"f", "right"}, {"h", "1/32"}};
    std::string dir1 = (fs::temp_directory_path() / "er_run1").string();
    std::string dir2 = (fs::temp_directory_path() / "er_run2").string();
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    cfg.out_dir = dir1;
    CHECK(run(cfg) == 0);
    cfg.out_dir = dir2;
    CHECK(run(cfg) == 0);
    // byte-identical JSON/CSV artifacts; timestamps live in run_meta.json
    CHECK(read_file(dir1 + "/result.json") == read_file(dir2 + "/result.json"));
    CHECK(read_file(dir1 + "/domain.json") == read_file(dir2 + "/domain.json"));
    json res = json::parse(read_file(dir1 + "/result.json"));
    CHECK(res.at("result").at("value").get<double>() == Approx(1.0).margin(1e-7));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("ray experiment artifacts and exit status") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::ray;
    cfg.params = {{"builtin", "lshape"}, {"e", "bottom"}, {"f", "top"}, {"eps", "2^-1..2^-4"}};
    std::string dir = (fs::temp_directory_path() / "er_ray").string();
    fs::remove_all(dir);
    cfg.out_dir = dir;
    CHECK(run(cfg) == 0);
    json rep = json::parse(read_file(dir + "/report.json"));
    CHECK(rep.at("target").get<double>() == 1.5);
    CHECK(rep.at("lower_bound_ok").get<bool>());
    std::string csv = read_file(dir + "/convergence.csv");
    CHECK(csv.rfind("eps,eps_mod,target,gap,error_bar\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("trajectory csv format") {
    PolynomialQD one({Complex(1, 0)});
    Trajectory t = trace_vertical(one, {0.2, 0});
    std::string csv = trajectory_csv(t);
    CHECK(csv.rfind("t,x,y\n", 0) == 0);
    json side = trajectory_sidecar(t);
    CHECK(side.at("kind") == "vertical");
    CHECK(side.at("end_a").at("kind") == "boundary");
}

TEST_CASE("lamination csv format") {
    SlitDomain sq = build_rectangle(Dyadic(1), Dyadic(1));
    std::string csv = lamination_csv(sample_mu(sq, 8));
    CHECK(csv.rfind("angle_a,angle_b,weight\n", 0) == 0);
}
