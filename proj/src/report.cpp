#include <cstdio>
#include <fstream>
#include <optional>
#include <system_error>

#include "fuzzystab/pipeline.hpp"

namespace fuzzystab {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "1" : "0"; }

class Table {
 public:
  Table(const std::filesystem::path& dir, const std::string& name,
        std::initializer_list<const char*> header)
      : path_(dir / (name + ".tsv")), out_(path_) {
    if (!out_) throw std::runtime_error("cannot open report file " + path_.string());
    bool first = true;
    for (const char* h : header) {
      if (!first) out_ << '\t';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : "\t") << cells, first = false), ...);
    out_ << '\n';
  }

  ~Table() {
    out_.flush();
    if (!out_) std::fprintf(stderr, "warning: failed writing %s\n", path_.string().c_str());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

void write_axiom_rows(Table& table, const AxiomReport& rep, const char* role) {
  for (const auto& e : rep.entries) {
    std::string wit_x = "", wit_y = "", wit_s = "", wit_a = "", wit_b = "", lhs = "", rhs = "";
    if (!e.failures.empty()) {
      const AxiomWitness& w = e.failures.front();
      wit_x = fmt(w.x_index);
      if (w.y_index) wit_y = fmt(*w.y_index);
      if (w.scalar) wit_s = fmt(*w.scalar);
      wit_a = fmt(w.a);
      if (w.b) wit_b = fmt(*w.b);
      lhs = fmt(w.lhs);
      rhs = fmt(w.rhs);
    }
    table.row(role, e.axiom, fmt(e.pass), fmt(e.vacuous), fmt(e.checks), fmt(e.failure_count),
              wit_x, wit_y, wit_s, wit_a, wit_b, lhs, rhs, e.note);
  }
}

const char* verb_name(PipelineVerb v) {
  switch (v) {
    case PipelineVerb::Axioms: return "axioms";
    case PipelineVerb::Stabilize: return "stabilize";
    case PipelineVerb::Verify: return "verify";
    case PipelineVerb::Run: return "run";
  }
  return "run";
}

}  // namespace

void emit_report(const RunReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create report directory " + dir.string() + ": " +
                                   ec.message());

  {
    std::ofstream echo(dir / "scenario_echo.json");
    if (!echo) throw std::runtime_error("cannot open " + (dir / "scenario_echo.json").string());
    echo << report.scenario_echo.dump(2) << '\n';
  }

  {
    Table table(dir, "axioms",
                {"role", "axiom", "pass", "vacuous", "checks", "failures", "wit_x", "wit_y",
                 "wit_scalar", "wit_a", "wit_b", "lhs", "rhs", "note"});
    if (report.axioms) write_axiom_rows(table, *report.axioms, "codomain");
    if (report.control_axioms) write_axiom_rows(table, *report.control_axioms, "control");
  }

  {
    Table table(dir, "algebra_condition",
                {"x_index", "y_index", "min_slack", "worst_a", "worst_b", "lhs", "rhs"});
    if (report.algebra_condition)
      for (const auto& r : report.algebra_condition->rows)
        table.row(fmt(r.x_index), fmt(r.y_index), fmt(r.min_slack), fmt(r.worst_a), fmt(r.worst_b),
                  fmt(r.lhs), fmt(r.rhs));
  }

  {
    Table table(dir, "scaling",
                {"x_index", "y_index", "phi_base", "phi_scaled", "crisp_slack", "fuzzy_min_slack"});
    if (report.scaling)
      for (const auto& r : report.scaling->rows)
        table.row(fmt(r.x_index), fmt(r.y_index), fmt(r.phi_base), fmt(r.phi_scaled),
                  fmt(r.crisp_slack), fmt(r.fuzzy_min_slack));
  }

  {
    Table table(dir, "domination",
                {"x_index", "y_index", "additive_defect", "product_defect", "phi",
                 "fuzzy_min_slack", "ok"});
    if (report.domination)
      for (const auto& r : report.domination->rows)
        table.row(fmt(r.x_index), fmt(r.y_index), fmt(r.additive_defect), fmt(r.product_defect),
                  fmt(r.phi), fmt(r.fuzzy_min_slack), fmt(r.ok));
  }

  {
    Table table(dir, "stabilization",
                {"probe_index", "iters_used", "residual", "converged", "limit_pass",
                 "cauchy_pass"});
    if (report.stabilization)
      for (std::size_t i = 0; i < report.stabilization->probes.size(); ++i) {
        const auto& p = report.stabilization->probes[i];
        const bool limit = i < report.trajectory_certs.size() && report.trajectory_certs[i].limit_pass;
        const bool cauchy = i < report.trajectory_certs.size() && report.trajectory_certs[i].cauchy_pass;
        table.row(fmt(i), fmt(p.iters_used), fmt(p.residual), fmt(p.converged), fmt(limit),
                  fmt(cauchy));
      }
  }

  for (const auto& defect_rep : report.defects) {
    Table table(dir, "defect_" + defect_kind_name(defect_rep.kind),
                {"x_index", "y_index", "value"});
    std::size_t idx = 0;
    const std::size_t n = defect_rep.point_count;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) table.row(fmt(i), fmt(j), fmt(defect_rep.values[idx++]));
  }

  {
    Table table(dir, "bound_check",
                {"point_index", "threshold", "lhs", "rhs", "fuzzy_slack", "crisp_dist",
                 "crisp_bound"});
    if (report.bound)
      for (const auto& r : report.bound->rows)
        table.row(fmt(r.point_index), fmt(r.threshold), fmt(r.lhs), fmt(r.rhs), fmt(r.fuzzy_slack),
                  fmt(r.crisp_dist), fmt(r.crisp_bound));
  }

  {
    Table table(dir, "uniqueness", {"probe_index", "crisp_diff", "min_fuzzy", "pass"});
    if (report.uniqueness)
      for (const auto& r : report.uniqueness->rows)
        table.row(fmt(r.probe_index), fmt(r.crisp_diff), fmt(r.min_fuzzy), fmt(r.pass));
  }

  {
    std::ofstream out(dir / "summary.txt");
    if (!out) throw std::runtime_error("cannot open " + (dir / "summary.txt").string());
    out << "verb: " << verb_name(report.verb) << "\n";
    out << "exit_code: " << report.exit_code << "\n";
    if (!report.failure_detail.empty()) out << "first_failure: " << report.failure_detail << "\n";
    out << "effective_noise_scale: " << fmt(report.effective_noise_scale) << "\n";
    out << "\nstages:\n";
    for (const auto& st : report.stages) {
      out << "  " << st.name << ": "
          << (st.skipped ? "SKIP" : (st.pass ? "PASS" : "FAIL"));
      if (!st.skipped) out << "  (" << fmt(st.millis) << " ms)";
      if (!st.detail.empty()) out << "  -- " << st.detail;
      out << "\n";
    }
    if (!report.defects.empty()) {
      out << "\ndefects (max over grid):\n";
      for (const auto& d : report.defects)
        out << "  " << defect_kind_name(d.kind) << ": " << fmt(d.max_defect) << "  at pair ("
            << d.x_index << "," << d.y_index << ")\n";
      out << "  identity gate: " << (report.defect_gate_pass ? "PASS" : "FAIL") << "\n";
      out << "  combination step: " << (report.chain_pass ? "PASS" : "FAIL") << "\n";
    }
    if (report.bound)
      out << "\nbound check: " << (report.bound->pass ? "PASS" : "FAIL")
          << "  min fuzzy slack " << fmt(report.bound->min_fuzzy_slack) << ", max crisp excess "
          << fmt(report.bound->max_crisp_excess) << "\n";
    if (report.uniqueness)
      out << "uniqueness: " << (report.uniqueness->pass ? "PASS" : "FAIL") << "  max crisp diff "
          << fmt(report.uniqueness->max_crisp_diff) << ", min fuzzy "
          << fmt(report.uniqueness->min_fuzzy)
          << (report.uniqueness->distinct_routes ? "" : "  (identical routes, trivial)") << "\n";
  }
}

}  // namespace fuzzystab
