#include <cmath>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dgnewton/config.hpp"
#include "dgnewton/dg_elasticity.hpp"
#include "dgnewton/dg_scalar.hpp"
#include "dgnewton/io.hpp"
#include "dgnewton/parallel.hpp"
#include "dgnewton/verification.hpp"

namespace
{

constexpr const char *kVersion = "1.0.0";
constexpr double kPi = 3.14159265358979323846;

using nlohmann::json;

std::string to_string_stream(const std::function<void(std::ostream &)> &writer)
{
   std::ostringstream out;
   writer(out);
   return out.str();
}

std::string join_path(const std::string &dir, const std::string &name)
{
   return dir + "/" + name;
}

void add_trace_output(const dgn::NewtonTrace &trace, const std::string &dir,
                      const std::string &name, json &outputs)
{
   const std::string path = join_path(dir, name);
   dgn::write_text_file(path, to_string_stream([&](std::ostream &out)
                                               { trace.write_csv(out); }));
   outputs.push_back(path);
}

void add_trace_summary(const dgn::NewtonTrace &trace, json &summary)
{
   summary["status"] = trace.converged ? "converged" : "nonconverged";
   summary["iterations"] = trace.total_iterations;
   summary["final_residual"] = trace.final_residual;
   summary["max_symmetry_defect"] = trace.max_symmetry_defect;
}

void write_scalar_fields(const dgn::ScalarProblem &problem,
                         const Eigen::VectorXd &u, const std::string &dir,
                         const std::string &base, json &outputs)
{
   const dgn::FunctionSpace space(problem.mesh, problem.space);
   if (problem.space == dgn::SpaceKind::DG)
   {
      std::vector<dgn::VtkField> cell_fields;
      cell_fields.push_back(dgn::cell_average(space, u, "u"));

      dgn::VtkField grad_norm{"grad_norm", 1, {}};
      dgn::VtkField plastic{"plastic", 1, {}};
      dgn::VtkField stress_norm{"stress_norm", 1, {}};
      for (int c = 0; c < problem.mesh.num_cells(); ++c)
      {
         const dgn::ScalarCellState state = dgn::scalar_cell_state(problem, u, c);
         grad_norm.data.push_back(state.grad.norm());
         plastic.data.push_back(state.plastic ? 1.0 : 0.0);
         stress_norm.data.push_back(state.stress.norm());
      }
      cell_fields.push_back(std::move(grad_norm));
      cell_fields.push_back(std::move(plastic));
      cell_fields.push_back(std::move(stress_norm));

      dgn::VtkField stress{"stress", 2,
                           dgn::project_stress_to_vertices(problem, u)};

      const std::string path = join_path(dir, base + ".vtk");
      dgn::write_text_file(
         path, to_string_stream(
                  [&](std::ostream &out)
                  { dgn::write_vtk(out, problem.mesh, {stress}, cell_fields); }));
      outputs.push_back(path);

      const std::string exploded = join_path(dir, base + "_exploded.vtk");
      dgn::write_text_file(
         exploded,
         to_string_stream([&](std::ostream &out)
                          { dgn::write_vtk_exploded(out, space, {{"u", u}}); }));
      outputs.push_back(exploded);
   }
   else
   {
      dgn::VtkField uf{"u", 1, std::vector<double>(u.data(), u.data() + u.size())};
      const std::string path = join_path(dir, base + ".vtk");
      dgn::write_text_file(
         path, to_string_stream([&](std::ostream &out)
                                { dgn::write_vtk(out, problem.mesh, {uf}, {}); }));
      outputs.push_back(path);
   }
}

void write_displacement_fields(const dgn::ElasticityProblem &problem,
                               const Eigen::VectorXd &u, dgn::SpaceKind kind,
                               const std::string &dir, const std::string &base,
                               json &outputs)
{
   const dgn::FunctionSpace space(problem.mesh, kind, 1, 3);
   if (kind == dgn::SpaceKind::DG)
   {
      const std::string path = join_path(dir, base + ".vtk");
      dgn::write_text_file(
         path,
         to_string_stream(
            [&](std::ostream &out)
            {
               dgn::write_vtk(out, problem.mesh, {},
                              {dgn::cell_average(space, u, "displacement")});
            }));
      outputs.push_back(path);

      const std::string exploded = join_path(dir, base + "_exploded.vtk");
      dgn::write_text_file(
         exploded, to_string_stream(
                      [&](std::ostream &out) {
                         dgn::write_vtk_exploded(out, space, {{"displacement", u}});
                      }));
      outputs.push_back(exploded);
   }
   else
   {
      dgn::VtkField uf{"displacement", 3,
                       std::vector<double>(u.data(), u.data() + u.size())};
      const std::string path = join_path(dir, base + ".vtk");
      dgn::write_text_file(
         path, to_string_stream([&](std::ostream &out)
                                { dgn::write_vtk(out, problem.mesh, {uf}, {}); }));
      outputs.push_back(path);
   }
}

void emit_summary(json &summary, const std::string &dir)
{
   const std::string path = join_path(dir, "summary.json");
   dgn::write_text_file(path, summary.dump(2) + "\n");
   summary["outputs"].push_back(path);
   std::cout << summary.dump(2) << std::endl;
}

dgn::ScalarProblem plasticity_problem_from(const dgn::RunConfig &config)
{
   dgn::ScalarProblem problem;
   problem.mesh = dgn::unit_square_mesh(config.n);
   problem.space = config.scheme == "cg" ? dgn::SpaceKind::CG : dgn::SpaceKind::DG;
   problem.material = std::make_shared<dgn::AntiplaneShearMaterial>(
      config.shear_modulus, config.yield_stress, config.eps_reg);
   problem.source = [](const Eigen::Vector3d &x)
   { return 7.5 * std::sin(kPi * x.x()) * std::sin(kPi * x.y()); };
   problem.dirichlet = [](const Eigen::Vector3d &) { return 0.0; };
   problem.gamma0 = config.gamma0;
   problem.averaging = config.averaging;
   return problem;
}

int run_solve(const std::string &config_path)
{
   const dgn::RunConfig config = dgn::load_run_config(config_path);
   const dgn::AssemblyOptions options{config.threads};

   json summary;
   summary["problem"] = config.problem;
   summary["scheme"] = config.scheme;
   summary["n"] = config.n;
   summary["gamma0"] = config.gamma0;
   summary["threads"] = dgn::resolve_threads(config.threads);
   summary["outputs"] = json::array();

   if (config.problem == "poisson")
   {
      dgn::ScalarProblem problem = dgn::poisson_mms_problem(
         config.n, config.scheme == "cg" ? dgn::SpaceKind::CG : dgn::SpaceKind::DG);
      const double k = config.conductivity;
      problem.material = std::make_shared<dgn::ScalarLinearMaterial>(k);
      problem.source = [k](const Eigen::Vector3d &x)
      { return 2.0 * kPi * kPi * k * std::sin(kPi * x.x()) * std::sin(kPi * x.y()); };
      problem.gamma0 = config.gamma0;
      problem.averaging = config.averaging;
      const dgn::FunctionSpace space(problem.mesh, problem.space);
      summary["dofs"] = space.num_dofs();

      Eigen::VectorXd u;
      if (config.scheme == "nitsche")
      {
         u = dgn::linear_solve(dgn::assemble_nitsche_linear(problem, options));
         summary["status"] = "converged";
      }
      else
      {
         auto [solution, trace] = dgn::newton_solve_scalar(
            problem,
            config.scheme == "dg-hybrid" ? dgn::ScalarScheme::Hybrid
                                         : dgn::ScalarScheme::Classical,
            config.newton, options);
         u = std::move(solution);
         add_trace_summary(trace, summary);
         add_trace_output(trace, config.output_dir, "trace_poisson.csv",
                          summary["outputs"]);
      }
      summary["l2_error"] = dgn::error_l2(
         space, u,
         [](const Eigen::Vector3d &x)
         { return std::sin(kPi * x.x()) * std::sin(kPi * x.y()); });
      write_scalar_fields(problem, u, config.output_dir, "poisson",
                          summary["outputs"]);
   }
   else if (config.problem == "plasticity")
   {
      const dgn::ScalarProblem problem = plasticity_problem_from(config);
      const dgn::FunctionSpace space(problem.mesh, problem.space);
      summary["dofs"] = space.num_dofs();

      auto [u, trace] = dgn::newton_solve_scalar(
         problem,
         config.scheme == "dg-hybrid" ? dgn::ScalarScheme::Hybrid
                                      : dgn::ScalarScheme::Classical,
         config.newton, options);
      add_trace_summary(trace, summary);
      add_trace_output(trace, config.output_dir, "trace_plasticity.csv",
                       summary["outputs"]);

      double max_stress = 0.0;
      int plastic_cells = 0;
      for (int c = 0; c < problem.mesh.num_cells(); ++c)
      {
         const dgn::ScalarCellState state = dgn::scalar_cell_state(problem, u, c);
         max_stress = std::max(max_stress, state.stress.norm());
         plastic_cells += state.plastic ? 1 : 0;
      }
      summary["max_stress_norm"] = max_stress;
      summary["plastic_cells"] = plastic_cells;
      write_scalar_fields(problem, u, config.output_dir, "plasticity",
                          summary["outputs"]);
   }
   else
   {
      dgn::ElasticityProblem problem = dgn::load_case(config.case_name, config.n);
      problem.material =
         dgn::MooneyRivlinMaterial::from_moduli(config.youngs, config.poisson);
      problem.gamma0 = config.gamma0;
      summary["case"] = config.case_name;

      const dgn::ElasticityMethod method = config.scheme == "cg"
                                              ? dgn::ElasticityMethod::CG
                                              : dgn::ElasticityMethod::DG;
      const dgn::SpaceKind kind = config.scheme == "cg" ? dgn::SpaceKind::CG
                                                        : dgn::SpaceKind::DG;
      const dgn::FunctionSpace space(problem.mesh, kind, 1, 3);
      summary["dofs"] = space.num_dofs();

      const dgn::ElasticityAssemblyOptions elastic_options{config.threads};
      auto [u, trace] = dgn::newton_solve_elasticity(problem, method,
                                                     config.newton,
                                                     elastic_options);
      add_trace_summary(trace, summary);
      add_trace_output(trace, config.output_dir,
                       "trace_" + config.case_name + ".csv", summary["outputs"]);
      write_displacement_fields(problem, u, kind, config.output_dir,
                                config.case_name, summary["outputs"]);
   }

   emit_summary(summary, config.output_dir);
   return 0;
}

int run_mms(const std::vector<int> &levels, const std::string &space,
            const std::string &out_dir)
{
   const dgn::ConvergenceStudy study = dgn::poisson_mms(
      levels, space == "cg" ? dgn::SpaceKind::CG : dgn::SpaceKind::DG);

   json summary;
   summary["levels"] = study.levels;
   summary["l2_error"] = study.l2_error;
   summary["h1_error"] = study.h1_error;
   summary["l2_rate"] = study.l2_rate;
   summary["h1_rate"] = study.h1_rate;
   summary["outputs"] = json::array();

   const std::string path = join_path(out_dir, "mms.csv");
   dgn::write_text_file(path, to_string_stream([&](std::ostream &out)
                                               { study.write_csv(out); }));
   summary["outputs"].push_back(path);
   emit_summary(summary, out_dir);
   return 0;
}

int run_case(const std::string &name, int n, const std::string &method,
             const std::string &out_dir, int threads)
{
   json summary;
   summary["case"] = name;
   summary["outputs"] = json::array();

   if (name == "plasticity")
   {
      const int level = n > 0 ? n : 16;
      summary["n"] = level;
      dgn::NewtonConfig config;
      const dgn::PlasticityResult result = dgn::plasticity_case(
         level, dgn::ScalarScheme::Hybrid, config,
         dgn::TractionAveraging::StressOfMean, dgn::AssemblyOptions{threads});
      add_trace_summary(result.trace, summary);
      add_trace_output(result.trace, out_dir, "trace_plasticity.csv",
                       summary["outputs"]);
      summary["max_stress_norm"] = result.max_stress_norm;
      summary["plastic_cells"] = result.plastic_cells;
      summary["symmetry_error"] = result.symmetry_error;
      write_scalar_fields(result.problem, result.u, out_dir, "plasticity",
                          summary["outputs"]);
   }
   else
   {
      const int level = n > 0 ? n : 4;
      summary["n"] = level;
      dgn::NewtonConfig config;
      config.load_steps = 10;
      const dgn::CaseMethod case_method = method == "dg" ? dgn::CaseMethod::DG
                                          : method == "cg" ? dgn::CaseMethod::CG
                                                           : dgn::CaseMethod::Both;
      const dgn::HyperelasticResult result = dgn::hyperelastic_case(
         name, level, case_method, config,
         dgn::ElasticityAssemblyOptions{threads});

      if (case_method != dgn::CaseMethod::CG)
      {
         add_trace_summary(result.trace_dg, summary);
         add_trace_output(result.trace_dg, out_dir, "trace_" + name + "_dg.csv",
                          summary["outputs"]);
         write_displacement_fields(result.problem, result.u_dg, dgn::SpaceKind::DG,
                                   out_dir, name + "_dg", summary["outputs"]);
      }
      if (case_method != dgn::CaseMethod::DG)
      {
         json cg_summary;
         add_trace_summary(result.trace_cg, cg_summary);
         summary["cg"] = cg_summary;
         add_trace_output(result.trace_cg, out_dir, "trace_" + name + "_cg.csv",
                          summary["outputs"]);
         write_displacement_fields(result.problem, result.u_cg, dgn::SpaceKind::CG,
                                   out_dir, name + "_cg", summary["outputs"]);
      }
      if (case_method == dgn::CaseMethod::Both)
      {
         summary["dg_cg_l2_diff"] = result.dg_cg_l2_diff;
      }
   }

   emit_summary(summary, out_dir);
   return 0;
}

int run_info()
{
   json info;
   info["name"] = "dgnewton";
   info["version"] = kVersion;
#ifdef DGN_HAVE_OPENMP
   info["openmp"] = true;
#else
   info["openmp"] = false;
#endif
   info["max_threads"] = dgn::resolve_threads(0);
   info["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                   std::to_string(EIGEN_MAJOR_VERSION) + "." +
                   std::to_string(EIGEN_MINOR_VERSION);
   std::cout << info.dump(2) << std::endl;
   return 0;
}

} // namespace

int main(int argc, char **argv)
{
   CLI::App app{"Interior penalty Newton solvers for nonlinear elasticity"};
   app.require_subcommand(1);

   auto *solve = app.add_subcommand("solve", "Run a problem from a JSON config");
   std::string config_path;
   solve->add_option("--config", config_path, "Config file path")->required();

   auto *mms = app.add_subcommand("mms", "Convergence study on the unit square");
   std::vector<int> levels{8, 16, 32};
   std::string mms_space = "dg";
   std::string mms_out = ".";
   mms->add_option("--levels", levels, "Mesh levels n, comma separated")
      ->delimiter(',');
   mms->add_option("--space", mms_space, "dg or cg")
      ->check(CLI::IsMember({"dg", "cg"}));
   mms->add_option("--out", mms_out, "Output directory");

   auto *case_cmd = app.add_subcommand("case", "Run a canned verification case");
   std::string case_name;
   int case_n = 0;
   std::string case_method = "both";
   std::string case_out = ".";
   int case_threads = 1;
   case_cmd->add_option("name", case_name, "twist, stretch, bend or plasticity")
      ->required()
      ->check(CLI::IsMember({"twist", "stretch", "bend", "plasticity"}));
   case_cmd->add_option("--n", case_n, "Mesh level (default 4, plasticity 16)");
   case_cmd->add_option("--method", case_method, "dg, cg or both")
      ->check(CLI::IsMember({"dg", "cg", "both"}));
   case_cmd->add_option("--out", case_out, "Output directory");
   case_cmd->add_option("--threads", case_threads, "Assembly threads");

   app.add_subcommand("info", "Print build information");

   try
   {
      app.parse(argc, argv);
   }
   catch (const CLI::ParseError &e)
   {
      const int code = app.exit(e);
      return code == 0 ? 0 : 2;
   }

   try
   {
      if (app.got_subcommand("solve"))
      {
         return run_solve(config_path);
      }
      if (app.got_subcommand("mms"))
      {
         return run_mms(levels, mms_space, mms_out);
      }
      if (app.got_subcommand("case"))
      {
         return run_case(case_name, case_n, case_method, case_out, case_threads);
      }
      return run_info();
   }
   catch (const dgn::NonConvergenceError &err)
   {
      json failure;
      failure["status"] = "nonconverged";
      failure["error"] = err.what();
      failure["iterations"] = err.trace.total_iterations;
      std::cout << failure.dump(2) << std::endl;
      std::cerr << "error: " << err.what() << std::endl;
      return 1;
   }
   catch (const dgn::ConfigError &err)
   {
      std::cerr << "config error: " << err.what() << std::endl;
      return 2;
   }
   catch (const std::exception &err)
   {
      std::cerr << "error: " << err.what() << std::endl;
      return 2;
   }
}
