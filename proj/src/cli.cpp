#include "swsforge/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "swsforge/bpel.hpp"
#include "swsforge/error.hpp"
#include "swsforge/pim.hpp"
#include "swsforge/sawsdl.hpp"
#include "swsforge/simulator.hpp"
#include "swsforge/transform.hpp"

namespace swsforge::cli {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << content) || !out.flush()) throw IoError("cannot write " + path.string());
}

struct Config {
    bool strict = false;
    std::string output_dir;
    std::size_t loop_limit = sim::Options{}.loop_limit;
    std::string model;
    std::string behavior;
    std::string service;
    std::string composite;
    std::string sawsdl;
    std::string bpel;
    std::string stubs;
    std::string input;
};

pim::ServiceModel load_model(const Config& c) {
    return pim::parse_model(read_file(c.model), {c.strict});
}

int cmd_validate(const Config& c, std::ostream& out) {
    const auto model = load_model(c);
    auto report = pim::validate(model);
    if (!c.behavior.empty()) {
        if (c.composite.empty()) throw InvariantViolation("--behavior needs --composite");
        if (report.empty()) {
            const auto behavior = behavior::parse_behavior(read_file(c.behavior), model);
            for (auto& v : behavior::validate_behavior(behavior, model, c.composite)) report.push_back(std::move(v));
        }
    }
    for (const auto& v : report) out << format_violation(v) << '\n';
    return report.empty() ? 0 : 1;
}

int cmd_gen_sawsdl(const Config& c, std::ostream& out) {
    const auto model = load_model(c);
    const auto result = transform::pim_to_psm(model, c.service);
    const fs::path path = fs::path(c.output_dir) / (c.service + ".wsdl");
    write_file(path, sawsdl::emit_sawsdl(result.description));
    out << path.string() << '\n';
    return 0;
}

int cmd_gen_bpel(const Config& c, std::ostream& out) {
    const auto model = load_model(c);
    auto report = pim::validate(model);
    if (!report.empty()) throw InvalidModel(std::move(report));
    const auto behavior = behavior::parse_behavior(read_file(c.behavior), model);
    for (const auto& p : bpel::emit_process_artifacts(model, behavior, c.composite, c.output_dir))
        out << p.string() << '\n';
    return 0;
}

int cmd_import(const Config& c, std::ostream& out) {
    const auto desc = sawsdl::parse_sawsdl(read_file(c.sawsdl));
    out << pim::serialize_model(transform::psm_to_pim(desc));
    return 0;
}

int cmd_simulate(const Config& c, std::ostream& out) {
    const auto doc = bpel::parse_bpel(read_file(c.bpel));
    const auto stubs = sim::parse_stubs(read_file(c.stubs));
    const auto initial = sim::parse_message(read_file(c.input));
    const auto trace = sim::simulate(doc, stubs, initial, {c.loop_limit});
    out << sim::to_jsonl(trace);
    return !trace.empty() && trace.back().kind == sim::Event::Kind::completed ? 0 : 1;
}

// Model and service: the service's slice of the model must survive
// generate, emit, parse and import unchanged. A .wsdl file: parse and emit
// must be inverse.
int cmd_roundtrip(const Config& c, std::ostream& out, std::ostream& err) {
    if (c.service.empty()) {
        const auto desc = sawsdl::parse_sawsdl(read_file(c.model));
        const auto again = sawsdl::parse_sawsdl(sawsdl::emit_sawsdl(desc));
        if (again != desc) {
            err << "description changed across emit and parse\n";
            return 1;
        }
        out << "identical\n";
        return 0;
    }
    const auto model = load_model(c);
    const auto result = transform::pim_to_psm(model, c.service);
    const auto back = transform::psm_to_pim(sawsdl::parse_sawsdl(sawsdl::emit_sawsdl(result.description)));
    const auto expected = pim::restrict_to(model, c.service);
    if (back != expected) {
        err << "model changed across the round trip\n--- expected\n"
            << pim::serialize_model(expected) << "--- got\n"
            << pim::serialize_model(back);
        return 1;
    }
    out << "identical\n";
    return 0;
}

void report_error(const Error& e, std::ostream& err) {
    err << e.code() << ": " << e.what() << '\n';
    if (const auto* invalid = dynamic_cast<const InvalidModel*>(&e))
        for (const auto& v : invalid->violations()) err << format_violation(v) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Model-driven generator for SAWSDL interfaces and BPEL compositions", "swsforge"};
    app.require_subcommand(1);
    Config c;
    app.add_flag("--strict", c.strict, "Reject unknown keys in model documents");

    auto* validate = app.add_subcommand("validate", "Check a service model (and optionally a behavior)");
    validate->add_option("model", c.model, "Model document")->required();
    validate->add_option("--behavior", c.behavior, "Behavior document of a composite");
    validate->add_option("--composite", c.composite, "Composite owning the behavior");

    auto* gen = app.add_subcommand("gen", "Generate artifacts");
    gen->require_subcommand(1);
    auto* gen_sawsdl = gen->add_subcommand("sawsdl", "Write <Service>.wsdl");
    gen_sawsdl->add_option("model", c.model, "Model document")->required();
    gen_sawsdl->add_option("service", c.service, "Service name")->required();
    gen_sawsdl->add_option("-o,--output", c.output_dir, "Output directory")->required();
    auto* gen_bpel = gen->add_subcommand("bpel", "Write <C>.wsdl, <C>-Process.wsdl and <C>.bpel");
    gen_bpel->add_option("model", c.model, "Model document")->required();
    gen_bpel->add_option("behavior", c.behavior, "Behavior document")->required();
    gen_bpel->add_option("composite", c.composite, "Composite service name")->required();
    gen_bpel->add_option("-o,--output", c.output_dir, "Output directory")->required();

    auto* import = app.add_subcommand("import", "Convert a SAWSDL document into a model document");
    import->add_option("sawsdl", c.sawsdl, "SAWSDL document")->required();

    auto* simulate = app.add_subcommand("simulate", "Run a BPEL process against stubs");
    simulate->add_option("bpel", c.bpel, "BPEL document")->required();
    simulate->add_option("stubs", c.stubs, "Stub registry")->required();
    simulate->add_option("input", c.input, "Initial request message")->required();
    simulate->add_option("--loop-limit", c.loop_limit, "Iterations allowed per loop")->check(CLI::PositiveNumber);

    auto* roundtrip = app.add_subcommand("roundtrip", "Check model->SAWSDL->model, or SAWSDL parse/emit, for identity");
    roundtrip->add_option("input", c.model, "Model document, or a .wsdl file when no service is given")->required();
    roundtrip->add_option("service", c.service, "Service name");

    for (auto* sub : {validate, gen_sawsdl, gen_bpel, import, simulate, roundtrip})
        sub->add_flag("--strict", c.strict, "Reject unknown keys in model documents");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*validate) return cmd_validate(c, out);
        if (*gen_sawsdl) return cmd_gen_sawsdl(c, out);
        if (*gen_bpel) return cmd_gen_bpel(c, out);
        if (*import) return cmd_import(c, out);
        if (*simulate) return cmd_simulate(c, out);
        if (*roundtrip) return cmd_roundtrip(c, out, err);
    } catch (const Error& e) {
        report_error(e, err);
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace swsforge::cli
