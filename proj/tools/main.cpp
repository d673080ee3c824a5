#include <iostream>

#include "commands.hpp"
#include "orchard/dag.hpp"
#include "orchard/error.hpp"
#include "orchard/pipeline.hpp"

using namespace orchard;

int main(int argc, char** argv) {
    CLI::App app{"orchard: DAG-aware multi-agent orchestration"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "orchard 0.1.0");

    int status = cli::kOk;
    cli::register_route(app, status);
    cli::register_exec(app, status);
    cli::register_batch(app, status);
    cli::register_ratio(app, status);
    cli::register_simulate(app, status);
    cli::register_calibrate(app, status);
    cli::register_report(app, status);
    cli::register_gen_corpus(app, status);

    try {
        app.parse(argc, argv);
        return status;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kOk : cli::kUsage;
    } catch (const cli::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return cli::kUsage;
    } catch (const ParameterError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return cli::kUsage;
    } catch (const ValidationError& e) {
        std::cerr << "invalid dag: " << e.report().summary() << "\n";
        return cli::kInvalidInput;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return cli::kInvalidInput;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return cli::kInvalidInput;
    } catch (const PipelineFailed& e) {
        std::cerr << e.what() << "\n";
        return e.stage() == PipelineFailed::Stage::Route ? cli::kInvalidInput : cli::kBackend;
    } catch (const BackendFailure& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return cli::kBackend;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return cli::kInternal;
    }
}
