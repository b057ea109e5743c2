#include <fstream>
#include <iostream>
#include <iterator>

#include <CLI11.hpp>

#include "walkindex/commands.hpp"

using namespace walkindex;
using walkindex::cli::Result;

namespace {

struct Common {
  std::string input = "-";
  std::optional<int> samples;
  std::optional<double> tol;
  std::string out;
  bool json = false;
  bool csv = false;
};

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path);
  if (!in) throw io::ParseError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

io::WalkDocument load(const Common& c) {
  io::WalkDocument doc = io::parse_document(read_input(c.input));
  if (c.samples) {
    if (*c.samples < 16) throw io::ParseError("--samples must be at least 16");
    doc.options.n_samples = *c.samples;
  }
  if (c.tol) doc.options.tol = *c.tol;
  return doc;
}

void emit(const Common& c, const Result& r, bool csv_default) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  const bool csv = !r.csv.empty() && (c.csv || (csv_default && !c.json));
  const std::string text = csv ? r.csv : io::dump(r.json);
  if (c.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(c.out);
    if (!f) throw std::runtime_error("cannot write " + c.out);
    f << text;
  }
}

void add_common(CLI::App* sub, Common& c, bool document = true) {
  if (document) sub->add_option("document", c.input, "walk document (JSON), '-' for stdin");
  sub->add_option("--samples", c.samples, "momentum samples (default 513)");
  sub->add_option("--tol", c.tol, "admissibility tolerance (default 1e-8)");
  sub->add_option("--out", c.out, "write output to PATH");
  auto* j = sub->add_flag("--json", c.json, "JSON output");
  auto* v = sub->add_flag("--csv", c.csv, "CSV output");
  j->excludes(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"walkindex: symmetry indices of one-dimensional quantum walks"};
  app.require_subcommand(1);

  Common c;
  bool canonical = false;
  auto* validate = app.add_subcommand("validate", "check unitarity, symmetry representation, admissibility and gap");
  add_common(validate, c);
  validate->add_flag("--canonical", canonical, "print the canonical form of the document instead of the report");

  auto* index = app.add_subcommand("index", "compute ind and the right symmetry index");
  add_common(index, c);

  auto* bands = app.add_subcommand("bands", "eigenphases over the Brillouin zone");
  add_common(bands, c);

  int grid = 16;
  std::optional<int> oracle;
  auto* phase = app.add_subcommand("phase-diagram", "split-step sweep over (theta1, theta2)");
  add_common(phase, c, false);
  phase->add_option("--grid", grid, "points per axis (at least 8)");
  phase->add_option("--oracle", oracle, "cross-check with the boundary oracle on N cells");

  std::string decoupler = "generic";
  int cells = 64;
  double mode_tol = 1e-6;
  auto* boundary = app.add_subcommand("boundary", "boundary modes of a decoupled finite walk");
  add_common(boundary, c);
  boundary->add_option("--decoupler", decoupler, "-isigma2 | isigma2 | sigma1 | -sigma1 | generic");
  boundary->add_option("--cells", cells, "number of cells");
  boundary->add_option("--mode-tol", mode_tol, "tolerance for eigenvalues at +-1");

  auto* regroup_cmd = app.add_subcommand("regroup", "pair neighbouring cells");
  add_common(regroup_cmd, c);

  auto* flatten_cmd = app.add_subcommand("flatten", "sampled flat-band walk");
  add_common(flatten_cmd, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kParseError;
  }

  try {
    Result r;
    bool csv_default = false;
    if (validate->parsed()) {
      const auto doc = load(c);
      if (canonical) {
        r.json = io::to_json(doc);
      } else {
        r = cli::cmd_validate(doc);
      }
    } else if (index->parsed()) {
      r = cli::cmd_index(load(c));
    } else if (bands->parsed()) {
      const auto doc = load(c);
      r = cli::cmd_bands(doc, doc.options.n_samples);
      csv_default = true;
    } else if (phase->parsed()) {
      if (grid < 8) throw io::ParseError("phase-diagram: --grid must be at least 8");
      if (oracle && *oracle < 8) throw io::ParseError("phase-diagram: --oracle needs at least 8 cells");
      r = cli::cmd_phase_diagram(grid, c.samples.value_or(513), oracle);
      csv_default = true;
    } else if (boundary->parsed()) {
      r = cli::cmd_boundary(load(c), decoupler, cells, mode_tol);
    } else if (regroup_cmd->parsed()) {
      r = cli::cmd_regroup(load(c));
    } else if (flatten_cmd->parsed()) {
      const auto doc = load(c);
      r = cli::cmd_flatten(doc, doc.options.n_samples);
    }
    emit(c, r, csv_default);
    return r.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code_for(e);
  }
}
