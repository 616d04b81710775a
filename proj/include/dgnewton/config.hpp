#pragma once

#include <stdexcept>
#include <string>

#include "dgnewton/dg_scalar.hpp"
#include "dgnewton/solver.hpp"

namespace dgn
{

struct ConfigError : std::runtime_error
{
   using std::runtime_error::runtime_error;
};

// One solver run as described by a JSON config file. Example:
//
//   {
//     "problem": "plasticity",            poisson | plasticity | hyperelastic
//     "scheme": "dg-hybrid",              nitsche | dg-classical | dg-hybrid | cg
//     "case": "twist",                    hyperelastic only: twist|stretch|bend
//     "mesh": {"n": 16},
//     "material": {"G": 1.0, "sigma_y": 1.0, "eps_reg": 1e-4,
//                  "youngs": 200.0, "poisson": 0.33, "k": 1.0},
//     "gamma0": 100.0,                    default: 100 x stiffness scale
//     "averaging": "stress-of-mean",      or mean-of-stress
//     "newton": {"tol_rel": 1e-8, "tol_abs": 1e-10, "max_iter": 30,
//                "load_steps": 10, "max_halvings": 6},
//     "threads": 1,
//     "output_dir": "out"
//   }
//
// Only "problem" is required; everything else has the defaults above
// (load_steps defaults to 1 for scalar problems, 10 for hyperelastic;
// gamma0 defaults to 100 x the material stiffness scale: 100 k for
// poisson, 100 G for plasticity, 100 E for hyperelastic).
// Unknown keys anywhere are rejected.
struct RunConfig
{
   std::string problem;
   std::string scheme = "dg-classical";
   std::string case_name = "twist";
   int n = 8;
   double gamma0 = 0.0; // resolved to 100 x stiffness scale when absent
   TractionAveraging averaging = TractionAveraging::StressOfMean;

   double shear_modulus = 1.0;  // plasticity
   double yield_stress = 1.0;
   double eps_reg = 1e-4;
   double youngs = 200.0;       // hyperelastic
   double poisson = 0.33;
   double conductivity = 1.0;   // poisson problem

   NewtonConfig newton;
   int threads = 1;
   std::string output_dir = ".";
};

// Parses and validates config text / file. Throws ConfigError on malformed
// JSON, unknown keys, bad enum values, or out-of-range numbers.
RunConfig parse_run_config(const std::string &json_text);
RunConfig load_run_config(const std::string &path);

} // namespace dgn
