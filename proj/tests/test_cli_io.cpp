#include <doctest.h>

#include "gdnlab/exact_solutions.hpp"
#include "gdnlab/experiment.hpp"
#include "gdnlab/invariants.hpp"
#include "gdnlab/lab_io.hpp"
#include "gdnlab/norms.hpp"

#include <cmath>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace gdnlab;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

fs::path scratch_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("gdnlab_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void write_bytes(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("snapshot files round trip bit for bit") {
    const fs::path dir = scratch_dir("snapshot");
    const Grid1D g(1024, 60.0);
    const SolitonParams p(1.5, 1.0, 0.7);
    Field f = soliton_field(p, g);
    f.time = 3.25;

    const fs::path path = dir / "soliton.gdnl";
    write_snapshot(f, p.sigma, path);

    const SnapshotHeader header = read_snapshot_header(path);
    CHECK(header.version == kSnapshotFormatVersion);
    CHECK(header.n == g.n);
    CHECK(header.length == 60.0);
    CHECK(header.time == 3.25);
    CHECK(header.sigma == 1.5);

    const Field back = read_snapshot(path);
    CHECK(back.time == f.time);
    CHECK(back.grid.n == g.n);
    CHECK(back.grid.length == g.length);
    CHECK(back.grid.origin == g.origin);
    REQUIRE(back.samples.size() == f.samples.size());
    bool identical = true;
    for (std::size_t i = 0; i < g.n; ++i)
        identical = identical &&
                    std::memcmp(&back.samples[i], &f.samples[i], sizeof(cdouble)) == 0;
    CHECK(identical);

    // Same bits in, same arithmetic out.
    CHECK(mass(back) == mass(f));
    CHECK(energy(back, p.sigma) == energy(f, p.sigma));

    SUBCASE("payload size matches the header count") {
        CHECK(fs::file_size(path) == 4 + 4 + 8 + 8 + 8 + 8 + 16 * g.n);
    }
}

TEST_CASE("snapshot reader rejects malformed files") {
    const fs::path dir = scratch_dir("corrupt");
    const Grid1D g(64, 10.0);
    Field f(g, 1.0);
    for (std::size_t i = 0; i < g.n; ++i)
        f.samples[i] = cdouble(std::sin(0.1 * i), std::cos(0.2 * i));
    const fs::path path = dir / "good.gdnl";
    write_snapshot(f, 1.0, path);
    const std::string bytes = read_bytes(path);

    SUBCASE("bad magic") {
        std::string bad = bytes;
        bad[0] = 'X';
        write_bytes(dir / "magic.gdnl", bad);
        CHECK_THROWS_AS(read_snapshot(dir / "magic.gdnl"), std::runtime_error);
    }
    SUBCASE("unknown version") {
        std::string bad = bytes;
        bad[4] = 99;
        write_bytes(dir / "version.gdnl", bad);
        CHECK_THROWS_AS(read_snapshot(dir / "version.gdnl"), std::runtime_error);
    }
    SUBCASE("truncated payload") {
        write_bytes(dir / "short.gdnl", bytes.substr(0, bytes.size() - 8));
        CHECK_THROWS_AS(read_snapshot(dir / "short.gdnl"), std::runtime_error);
    }
    SUBCASE("truncated header") {
        write_bytes(dir / "stub.gdnl", bytes.substr(0, 20));
        CHECK_THROWS_AS(read_snapshot_header(dir / "stub.gdnl"), std::runtime_error);
    }
    SUBCASE("trailing bytes") {
        write_bytes(dir / "long.gdnl", bytes + "extra");
        CHECK_THROWS_AS(read_snapshot(dir / "long.gdnl"), std::runtime_error);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_snapshot(dir / "absent.gdnl"), std::runtime_error);
    }
    SUBCASE("writer rejects off-center boxes and bad metadata") {
        Field shifted(Grid1D(64, 10.0), 0.0);
        shifted.grid.origin = 0.0;
        CHECK_THROWS_AS(write_snapshot(shifted, 1.0, dir / "never.gdnl"),
                        std::invalid_argument);
        Field bad_time = f;
        bad_time.time = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(write_snapshot(bad_time, 1.0, dir / "never.gdnl"),
                        std::invalid_argument);
        CHECK_THROWS_AS(write_snapshot(f, -1.0, dir / "never.gdnl"), std::invalid_argument);
    }
}

TEST_CASE("config parsing materializes defaults") {
    SUBCASE("minimal file") {
        const ExperimentConfig cfg = parse_config_text("sigma = 2\nepsilon = 0.04\n");
        CHECK(cfg.name == ExperimentName::E1);
        CHECK(cfg.sim.sigma == 2.0);
        CHECK(cfg.epsilon == 0.04);
        CHECK(cfg.d_constant == 1.0 / (10.0 * 0.04));
        CHECK(cfg.sim.grid.n == 32768);
        CHECK(cfg.sim.t_end == 128.0);
        CHECK(cfg.sim.snapshot_times.front() == 0.0);
        CHECK(cfg.sim.snapshot_times.back() == 128.0);
        CHECK(cfg.initial_data == InitialData::gaussian);
        CHECK(cfg.output_dir == fs::path("out/e1"));
    }
    SUBCASE("comments, spacing, and explicit keys") {
        const ExperimentConfig cfg = parse_config_text(
            "# a comment line\n"
            "experiment = E5   # trailing comment\n"
            "\n"
            "t_end = 16\n"
            "seed = 7\n"
            "initial_data = chirped\n");
        CHECK(cfg.name == ExperimentName::E5);
        CHECK(cfg.sim.t_end == 16.0);
        CHECK(cfg.seed == 7);
        CHECK(cfg.initial_data == InitialData::chirped);
        // ladder re-materialized from the shortened horizon
        CHECK(cfg.sim.snapshot_times.back() == 16.0);
        CHECK(cfg.velocity_count == 21);
    }
    SUBCASE("t_end shrink keeps the soliton experiment on integer snapshots") {
        const ExperimentConfig cfg = parse_config_text("experiment = E4\nt_end = 3\n");
        CHECK(cfg.sim.snapshot_times == std::vector<double>{0.0, 1.0, 2.0, 3.0});
    }
    SUBCASE("explicit snapshot times win") {
        const ExperimentConfig cfg =
            parse_config_text("experiment = E4\nsnapshot_times = 0, 2.5, 5\n");
        CHECK(cfg.sim.snapshot_times == std::vector<double>{0.0, 2.5, 5.0});
    }
}

TEST_CASE("config parsing rejects bad input by name") {
    auto message_of = [](const std::string& text) {
        try {
            parse_config_text(text);
        } catch (const std::exception& e) {
            return std::string(e.what());
        }
        return std::string();
    };

    SUBCASE("epsilon outside the small-data regime") {
        const std::string msg = message_of("experiment = E2\nepsilon = 0.5\n");
        CHECK(msg.find("epsilon") != std::string::npos);
        CHECK(msg.find("small-data") != std::string::npos);
    }
    SUBCASE("unknown key") {
        const std::string msg = message_of("sigmma = 1\n");
        CHECK(msg.find("unknown key") != std::string::npos);
        CHECK(msg.find("sigmma") != std::string::npos);
    }
    SUBCASE("duplicate key") {
        const std::string msg = message_of("sigma = 1\nsigma = 2\n");
        CHECK(msg.find("duplicate") != std::string::npos);
        CHECK(msg.find("sigma") != std::string::npos);
    }
    SUBCASE("malformed number") {
        const std::string msg = message_of("dt = fast\n");
        CHECK(msg.find("dt") != std::string::npos);
        CHECK(msg.find("fast") != std::string::npos);
    }
    SUBCASE("malformed line") {
        CHECK(message_of("just some words\n").find("key = value") != std::string::npos);
    }
    SUBCASE("unknown experiment") {
        CHECK(message_of("experiment = E9\n").find("E1..E5") != std::string::npos);
    }
    SUBCASE("conflicting ladder specifications") {
        const std::string msg =
            message_of("snapshot_times = 0,1\nsnapshots_per_octave = 4\n");
        CHECK(msg.find("mutually exclusive") != std::string::npos);
    }
    SUBCASE("dt above the accuracy ceiling") {
        CHECK_THROWS_AS((void)parse_config_text("experiment = E4\ndt = 0.01\n"),
                        std::invalid_argument);
    }
}

TEST_CASE("config echo reparses to the same structure") {
    const std::string source =
        "experiment = E3\n"
        "epsilon = 0.03\n"
        "n = 8192\n"
        "length = 2400\n"
        "dt = 0.05\n"
        "t_end = 64\n"
        "velocity_count = 129\n"
        "seed = 12\n"
        "output_dir = out/custom\n";
    const ExperimentConfig first = parse_config_text(source);
    const ExperimentConfig second = parse_config_text(config_text(first));
    CHECK(first == second);

    SUBCASE("file round trip") {
        const fs::path dir = scratch_dir("config");
        write_config(first, dir / "echo.cfg");
        CHECK(parse_config(dir / "echo.cfg") == first);
    }
    SUBCASE("default sets for every experiment") {
        for (ExperimentName name : {ExperimentName::E1, ExperimentName::E2,
                                    ExperimentName::E3, ExperimentName::E4,
                                    ExperimentName::E5}) {
            const ExperimentConfig cfg = default_config(name);
            CHECK_NOTHROW(cfg.validate());
            CHECK(parse_config_text(config_text(cfg)) == cfg);
            CHECK(experiment_from_string(to_string(name)) == name);
        }
    }
}

TEST_CASE("csv writer emits rfc 4180 rows that survive reparsing") {
    std::ostringstream out;
    CsvWriter csv(out, {"t", "value"});
    const double awkward = 0.1 + 0.2;
    csv.row({1.0, awkward});
    csv.row({2.0, 1e-300});

    const std::string text = out.str();
    CHECK(text.find("t,value\r\n") == 0);
    CHECK(text.find('\n') != std::string::npos);

    // every data line reparses to the exact double
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    const std::size_t comma = line.find(',');
    const double reparsed = std::stod(line.substr(comma + 1));
    CHECK(reparsed == awkward);

    SUBCASE("row width is enforced") {
        CHECK_THROWS_AS(csv.row({1.0}), std::invalid_argument);
        CHECK_THROWS_AS(csv.row({1.0, 2.0, 3.0}), std::invalid_argument);
    }
    SUBCASE("column names cannot break the framing") {
        std::ostringstream sink;
        CHECK_THROWS_AS(CsvWriter(sink, {"a,b"}), std::invalid_argument);
        CHECK_THROWS_AS(CsvWriter(sink, {}), std::invalid_argument);
    }
    SUBCASE("format_double survives a text round trip") {
        for (double v : {M_PI, -1.0 / 3.0, 6.02e23, 5e-324, 0.0, -0.0}) {
            const std::string text = format_double(v);
            double back = 0.0;
            const auto res = std::from_chars(text.data(), text.data() + text.size(), back);
            REQUIRE(res.ec == std::errc());
            CHECK(back == v);
        }
    }
}

TEST_CASE("svg plots are self contained") {
    const fs::path dir = scratch_dir("svg");
    PlotSeries s;
    s.label = "decay";
    for (int k = 0; k < 12; ++k) {
        s.x.push_back(std::pow(2.0, k));
        s.y.push_back(3.0 * std::pow(2.0, -0.5 * k));
    }
    write_svg_plot(dir / "plot.svg", "demo", "t", "value", {s}, true);

    const std::string svg = read_bytes(dir / "plot.svg");
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.rfind("</svg>") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("decay") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);

    SUBCASE("log axes reject nonpositive data") {
        PlotSeries bad = s;
        bad.y[3] = 0.0;
        CHECK_THROWS_AS(write_svg_plot(dir / "bad.svg", "demo", "t", "value", {bad}, true),
                        std::invalid_argument);
        CHECK_NOTHROW(write_svg_plot(dir / "lin.svg", "demo", "t", "value", {bad}, false));
    }
    SUBCASE("labels are escaped") {
        PlotSeries esc = s;
        esc.label = "a<b&c";
        write_svg_plot(dir / "esc.svg", "x<y", "t", "v", {esc}, false);
        const std::string escaped = read_bytes(dir / "esc.svg");
        CHECK(escaped.find("a&lt;b&amp;c") != std::string::npos);
        CHECK(escaped.find("x&lt;y") != std::string::npos);
    }
}

TEST_CASE("initial data menu") {
    ExperimentConfig cfg = default_config(ExperimentName::E2);
    cfg.sim.grid = Grid1D(2048, 600.0);
    cfg.sim.dt = 0.05;
    cfg.epsilon = 0.05;

    SUBCASE("gaussian peaks at epsilon") {
        const Field f = initial_state(cfg);
        CHECK(lp_norm(f, kInf) == doctest::Approx(cfg.epsilon).epsilon(1e-12));
        CHECK(std::abs(f.samples[1024]) == doctest::Approx(0.05).epsilon(1e-9));
    }
    SUBCASE("chirp preserves the envelope") {
        cfg.initial_data = InitialData::chirped;
        const Field chirped = initial_state(cfg);
        cfg.initial_data = InitialData::gaussian;
        const Field plain = initial_state(cfg);
        double env_gap = 0.0, imag_mass = 0.0;
        for (std::size_t i = 0; i < chirped.grid.n; ++i) {
            env_gap = std::max(env_gap,
                               std::fabs(std::abs(chirped.samples[i]) -
                                         std::abs(plain.samples[i])));
            imag_mass += std::fabs(chirped.samples[i].imag());
        }
        CHECK(env_gap < 1e-14);
        CHECK(imag_mass > 1.0e-2);
    }
    SUBCASE("random data is seeded and scaled") {
        cfg.initial_data = InitialData::random;
        cfg.seed = 5;
        const Field a = initial_state(cfg);
        const Field b = initial_state(cfg);
        cfg.seed = 6;
        const Field c = initial_state(cfg);
        CHECK(lp_norm(a, kInf) == doctest::Approx(cfg.epsilon).epsilon(1e-12));
        double same = 0.0, different = 0.0;
        for (std::size_t i = 0; i < a.grid.n; ++i) {
            same += std::abs(a.samples[i] - b.samples[i]);
            different += std::abs(a.samples[i] - c.samples[i]);
        }
        CHECK(same == 0.0);
        CHECK(different > 1e-3);
    }
    SUBCASE("zero data is zero") {
        cfg.initial_data = InitialData::zero;
        CHECK(lp_norm(initial_state(cfg), kInf) == 0.0);
    }
}

TEST_CASE("experiment validation guards the regime") {
    ExperimentConfig cfg = default_config(ExperimentName::E2);
    cfg.epsilon = 0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    // the soliton experiment is not a small-data run
    ExperimentConfig e4 = default_config(ExperimentName::E4);
    e4.epsilon = 0.5;
    CHECK_NOTHROW(e4.validate());

    ExperimentConfig bad = default_config(ExperimentName::E1);
    bad.velocity_count = 2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = default_config(ExperimentName::E1);
    bad.d_constant = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = default_config(ExperimentName::E1);
    bad.mass_drift_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("zero initial data passes the dispersive experiment trivially") {
    const fs::path dir = scratch_dir("zero_run");
    ExperimentConfig cfg = default_config(ExperimentName::E1);
    cfg.sim.grid = Grid1D(512, 200.0);
    cfg.sim.dt = 0.05;
    cfg.sim.t_end = 16.0;
    cfg.sim.snapshot_times = {0.0, 1.0, 2.0, 4.0, 8.0, 16.0};
    cfg.initial_data = InitialData::zero;
    cfg.output_dir = dir;

    const ExperimentResult result = run_experiment(cfg);
    CHECK(result.exit_code == 0);
    CHECK(result.report.passed());

    // every numeric column in the series is exactly zero
    std::ifstream in(dir / "series.csv", std::ios::binary);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    bool all_zero = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        ++rows;
        std::stringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ','); // time column
        while (std::getline(ls, cell, ','))
            all_zero = all_zero && std::stod(cell) == 0.0;
    }
    CHECK(rows == 6);
    CHECK(all_zero);
}

TEST_CASE("experiment artifacts are byte deterministic") {
    auto run_once = [](const fs::path& dir) {
        ExperimentConfig cfg = default_config(ExperimentName::E2);
        cfg.sim.grid = Grid1D(2048, 600.0);
        cfg.sim.dt = 0.05;
        cfg.sim.t_end = 16.0;
        cfg.sim.snapshot_times.clear();
        cfg.sim.snapshot_times.push_back(0.0);
        for (int k = 0; k <= 32; ++k)
            cfg.sim.snapshot_times.push_back(std::pow(2.0, k / 8.0));
        cfg.output_dir = dir;
        return run_experiment(cfg);
    };

    const fs::path dir_a = scratch_dir("det_a");
    const fs::path dir_b = scratch_dir("det_b");
    const ExperimentResult a = run_once(dir_a);
    const ExperimentResult b = run_once(dir_b);
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);

    CHECK(read_bytes(dir_a / "series.csv") == read_bytes(dir_b / "series.csv"));
    CHECK(read_bytes(dir_a / "report.txt") == read_bytes(dir_b / "report.txt"));
    CHECK(read_bytes(dir_a / "snapshots/snapshot_0008.gdnl") ==
          read_bytes(dir_b / "snapshots/snapshot_0008.gdnl"));

    // the config echoes may differ only in their output_dir lines
    auto strip_dir = [](std::string text) {
        std::istringstream in(text);
        std::string line, kept;
        while (std::getline(in, line))
            if (line.rfind("output_dir", 0) != 0)
                kept += line + "\n";
        return kept;
    };
    CHECK(strip_dir(read_bytes(dir_a / "config_echo.cfg")) ==
          strip_dir(read_bytes(dir_b / "config_echo.cfg")));

    SUBCASE("report text names every row once") {
        const std::string report = read_bytes(dir_a / "report.txt");
        for (const char* row : {"pointwise_decay_K_u", "gradient_decay_K_ux",
                                "lu_growth_exponent", "bootstrap_lu_within_D_eps",
                                "conservation_mass_drift", "conservation_energy_drift"}) {
            const std::size_t first = report.find(row);
            REQUIRE(first != std::string::npos);
            CHECK(report.find(row, first + 1) == std::string::npos);
        }
        CHECK(report.find("verdict PASS") != std::string::npos);
    }
}

TEST_CASE("solver aborts surface as structured failure records") {
    const fs::path dir = scratch_dir("abort_run");
    ExperimentConfig cfg = default_config(ExperimentName::E2);
    // A box far too small for the data: the spreading wave hits the tail
    // guard within a few units of time.
    cfg.sim.grid = Grid1D(256, 40.0);
    cfg.sim.dt = 0.01;
    cfg.sim.t_end = 32.0;
    cfg.sim.snapshot_times = {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
    cfg.output_dir = dir;

    const ExperimentResult result = run_experiment(cfg);
    CHECK(result.exit_code == 2);
    CHECK_FALSE(result.report.passed());
    REQUIRE(result.report.abort.has_value());
    CHECK(result.report.abort->reason.find("tail") != std::string::npos);

    const std::string failure = read_bytes(dir / "failure.txt");
    CHECK(failure.find("reason") != std::string::npos);
    const std::string report = read_bytes(dir / "report.txt");
    CHECK(report.find("abort") != std::string::npos);
    CHECK(report.find("verdict FAIL") != std::string::npos);
}
