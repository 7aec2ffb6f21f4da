#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>
#include <string>

#include "airgnn/config.hpp"

using namespace airgnn;
using config::RunConfig;
using config::parse_config_text;

TEST_CASE("empty text yields the reference defaults") {
    const RunConfig cfg = parse_config_text("");
    CHECK(cfg.data.K == 20);
    CHECK(cfg.data.field_len == 500.0);
    CHECK(cfg.data.T == 10);
    CHECK(cfg.data.channel.carrier_hz == 2.4e9);
    CHECK(cfg.data.channel.pmax_dbm == 40.0);
    CHECK(cfg.kind == gnn::PolicyKind::mpnn);
    CHECK(cfg.layers == 3);
    CHECK(cfg.train.batch_size == 50);
    CHECK(cfg.train.iterations == 2000);
    CHECK(cfg.train.initial_lr == 0.002);
    CHECK(cfg.train.lr_decay == 0.9);
    CHECK(cfg.train.decay_interval == 100);
    CHECK(cfg.overhead.delta_csi == 1);
    CHECK(cfg.overhead.delta_mp == 5);
    CHECK(cfg.overhead.ns == 3000);
}

TEST_CASE("values are parsed per section") {
    const std::string text =
        "[channel]\n"
        "pairs = 30\n"
        "field_len_m = 750\n"
        "rho_mode = fixed\n"
        "rho = 0.4\n"
        "seed = 99\n"
        "\n"
        "[model]\n"
        "kind = air-mpnn\n"
        "layers = 2\n"
        "\n"
        "[train]\n"
        "batch_size = 10\n"
        "iterations = 300\n"
        "lr = 0.01\n"
        "threads = 4\n"
        "\n"
        "[overhead]\n"
        "delta_csi = 2\n"
        "delta_mp = 20\n"
        "frame_symbols = 200\n";
    const RunConfig cfg = parse_config_text(text);
    CHECK(cfg.data.K == 30);
    CHECK(cfg.data.field_len == 750.0);
    CHECK(cfg.data.rho_mode == netgen::RhoMode::fixed);
    CHECK(cfg.data.rho_fixed == 0.4);
    CHECK(cfg.data.seed == 99);
    CHECK(cfg.kind == gnn::PolicyKind::air_mpnn);
    CHECK(cfg.layers == 2);
    CHECK(cfg.train.batch_size == 10);
    CHECK(cfg.train.iterations == 300);
    CHECK(cfg.train.initial_lr == 0.01);
    CHECK(cfg.train.threads == 4);
    CHECK(cfg.overhead.delta_csi == 2);
    CHECK(cfg.overhead.delta_mp == 20);
    CHECK(cfg.overhead.ns == 200);
    CHECK(cfg.overhead.layers == 2);  // mirrored from the model section
}

TEST_CASE("comments and blank lines are ignored") {
    const RunConfig cfg = parse_config_text(
        "# a comment\n"
        "\n"
        "[train]\n"
        "  lr = 0.5   # trailing comment\n");
    CHECK(cfg.train.initial_lr == 0.5);
}

TEST_CASE("the recurrent policy always uses one round") {
    const RunConfig cfg = parse_config_text(
        "[model]\n"
        "kind = air-mprnn\n"
        "layers = 3\n");
    CHECK(cfg.kind == gnn::PolicyKind::air_mprnn);
    CHECK(cfg.layers == 1);
}

TEST_CASE("errors carry the line number and offending token") {
    auto message = [](const std::string& text) -> std::string {
        try {
            parse_config_text(text);
        } catch (const std::runtime_error& e) {
            return e.what();
        }
        return "";
    };
    SUBCASE("unknown key") {
        const std::string m = message("[train]\nlearning_rate = 3\n");
        CHECK(m.find("line 2") != std::string::npos);
        CHECK(m.find("learning_rate") != std::string::npos);
    }
    SUBCASE("unknown section") {
        const std::string m = message("\n\n[optimizer]\n");
        CHECK(m.find("line 3") != std::string::npos);
        CHECK(m.find("optimizer") != std::string::npos);
    }
    SUBCASE("malformed line") {
        CHECK(message("[train]\nbatch_size\n").find("line 2") != std::string::npos);
    }
    SUBCASE("key before any section") {
        CHECK(message("pairs = 4\n").find("line 1") != std::string::npos);
    }
    SUBCASE("bad numeric value") {
        CHECK(message("[train]\nbatch_size = many\n").find("line 2") != std::string::npos);
    }
    SUBCASE("bad enum values") {
        CHECK_THROWS(parse_config_text("[model]\nkind = cnn\n"));
        CHECK_THROWS(parse_config_text("[channel]\nrho_mode = random\n"));
    }
}
