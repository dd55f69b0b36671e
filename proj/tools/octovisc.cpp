#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "octovisc/pipeline.hpp"

int main(int argc, char** argv) {
    using namespace octovisc;

    CLI::App app{"Audits for the octonionic cubic P24 and the singular functions P24/|x|^delta"};
    app.require_subcommand(1, 1);

    RunConfig cfg;
    std::uint64_t seed = 0, samples = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--delta", cfg.delta, "exponent delta in [1, 2)");
        sub->add_option("--seed", seed, "64-bit seed (falls back to OCTOVISC_SEED)");
        sub->add_option("--samples", samples, "sample count (command default when omitted)");
        sub->add_option("--subspace", cfg.subspace, "default | random | path to a {\"basis\": [...]} file");
        sub->add_option("--out", cfg.out, "report path (stdout when omitted)");
        sub->add_option("--csv", cfg.csv, "CSV of the extremal statistics");
        sub->add_option("--threads", cfg.threads, "worker threads, 0 = hardware concurrency");
        sub->add_option("--tolerance-scale", cfg.tolerance_scale, "multiplies every asserted tolerance");
    };

    for (const auto& [name, cmd] : command_names()) {
        CLI::App* sub = app.add_subcommand(name);
        common(sub);
        switch (cmd) {
        case Command::spectrum:
            sub->add_option("--point", cfg.point, "unit-real-triple | random | path to {\"X\",\"Y\",\"Z\"}");
            break;
        case Command::build_operator:
            sub->add_option("--table", cfg.table, "output table (JSON lines)")->required();
            break;
        case Command::audit_operator:
            sub->add_option("--table", cfg.table, "input table; rebuilt from the seed when omitted");
            break;
        case Command::isaacs_witness:
            sub->add_option("--pencil", cfg.pencil, "path to {\"F1\",\"F2\"}; random Hessian pair when omitted");
            break;
        case Command::merge_tables:
            sub->add_option("--table", cfg.table, "first table")->required();
            sub->add_option("--merge-with", cfg.merge_with, "second table")->required();
            sub->add_option("--table-out", cfg.table_out, "merged table")->required();
            break;
        default:
            break;
        }
        sub->callback([&cfg, cmd, sub, &seed, &samples] {
            cfg.command = cmd;
            if (sub->count("--seed")) cfg.seed = seed;
            if (sub->count("--samples")) cfg.samples = samples;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    return run(cfg);
}
