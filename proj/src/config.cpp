#include "dgnewton/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace dgn
{

namespace
{

using nlohmann::json;

void reject_unknown_keys(const json &object, const std::string &where,
                         const std::set<std::string> &allowed)
{
   for (const auto &[key, value] : object.items())
   {
      if (!allowed.count(key))
      {
         throw ConfigError("unknown key '" + key + "' in " + where);
      }
   }
}

template <typename T>
void read(const json &object, const char *key, T &target)
{
   if (object.contains(key))
   {
      try
      {
         target = object.at(key).get<T>();
      }
      catch (const json::exception &)
      {
         throw ConfigError(std::string("bad value for '") + key + "'");
      }
   }
}

void require_positive(double value, const char *name)
{
   if (!(value > 0.0))
   {
      throw ConfigError(std::string(name) + " must be positive");
   }
}

} // namespace

RunConfig parse_run_config(const std::string &json_text)
{
   json root;
   try
   {
      root = json::parse(json_text);
   }
   catch (const json::exception &err)
   {
      throw ConfigError(std::string("config is not valid JSON: ") + err.what());
   }
   if (!root.is_object())
   {
      throw ConfigError("config root must be a JSON object");
   }
   reject_unknown_keys(root, "config",
                       {"problem", "scheme", "case", "mesh", "material", "gamma0",
                        "averaging", "newton", "threads", "output_dir"});

   RunConfig config;
   if (!root.contains("problem"))
   {
      throw ConfigError("config requires a 'problem' entry");
   }
   read(root, "problem", config.problem);
   if (config.problem != "poisson" && config.problem != "plasticity" &&
       config.problem != "hyperelastic")
   {
      throw ConfigError("problem must be poisson, plasticity or hyperelastic");
   }
   config.newton.load_steps = config.problem == "hyperelastic" ? 10 : 1;

   read(root, "scheme", config.scheme);
   const std::set<std::string> schemes{"nitsche", "dg-classical", "dg-hybrid",
                                       "cg"};
   if (!schemes.count(config.scheme))
   {
      throw ConfigError("scheme must be nitsche, dg-classical, dg-hybrid or cg");
   }
   if (config.scheme == "nitsche" && config.problem != "poisson")
   {
      throw ConfigError("scheme nitsche applies to the poisson problem only");
   }
   if (config.scheme == "dg-hybrid" && config.problem == "hyperelastic")
   {
      throw ConfigError("scheme dg-hybrid applies to scalar problems only");
   }

   read(root, "case", config.case_name);
   if (config.problem == "hyperelastic" && config.case_name != "twist" &&
       config.case_name != "stretch" && config.case_name != "bend")
   {
      throw ConfigError("case must be twist, stretch or bend");
   }

   if (root.contains("mesh"))
   {
      const json &mesh = root.at("mesh");
      if (!mesh.is_object())
      {
         throw ConfigError("mesh must be an object");
      }
      reject_unknown_keys(mesh, "mesh", {"n"});
      read(mesh, "n", config.n);
      if (config.n < 1)
      {
         throw ConfigError("mesh.n must be at least 1");
      }
   }

   if (root.contains("material"))
   {
      const json &material = root.at("material");
      if (!material.is_object())
      {
         throw ConfigError("material must be an object");
      }
      reject_unknown_keys(material, "material",
                          {"G", "sigma_y", "eps_reg", "youngs", "poisson", "k"});
      read(material, "G", config.shear_modulus);
      read(material, "sigma_y", config.yield_stress);
      read(material, "eps_reg", config.eps_reg);
      read(material, "youngs", config.youngs);
      read(material, "poisson", config.poisson);
      read(material, "k", config.conductivity);
      require_positive(config.shear_modulus, "material.G");
      require_positive(config.yield_stress, "material.sigma_y");
      require_positive(config.youngs, "material.youngs");
      require_positive(config.conductivity, "material.k");
      if (!(config.poisson > -1.0 && config.poisson < 0.5))
      {
         throw ConfigError("material.poisson must lie in (-1, 1/2)");
      }
   }

   if (root.contains("gamma0"))
   {
      read(root, "gamma0", config.gamma0);
      require_positive(config.gamma0, "gamma0");
   }
   else
   {
      // 100 x the material stiffness scale of the selected problem.
      config.gamma0 = config.problem == "poisson"      ? 100.0 * config.conductivity
                      : config.problem == "plasticity" ? 100.0 * config.shear_modulus
                                                       : 100.0 * config.youngs;
   }
   config.newton.gamma0 = config.gamma0;

   std::string averaging = "stress-of-mean";
   read(root, "averaging", averaging);
   if (averaging == "stress-of-mean")
   {
      config.averaging = TractionAveraging::StressOfMean;
   }
   else if (averaging == "mean-of-stress")
   {
      config.averaging = TractionAveraging::MeanOfStress;
   }
   else
   {
      throw ConfigError("averaging must be stress-of-mean or mean-of-stress");
   }

   if (root.contains("newton"))
   {
      const json &newton = root.at("newton");
      if (!newton.is_object())
      {
         throw ConfigError("newton must be an object");
      }
      reject_unknown_keys(newton, "newton",
                          {"tol_rel", "tol_abs", "max_iter", "load_steps",
                           "max_halvings"});
      read(newton, "tol_rel", config.newton.tol_rel);
      read(newton, "tol_abs", config.newton.tol_abs);
      read(newton, "max_iter", config.newton.max_iter);
      read(newton, "load_steps", config.newton.load_steps);
      read(newton, "max_halvings", config.newton.max_halvings);
      require_positive(config.newton.tol_rel, "newton.tol_rel");
      require_positive(config.newton.tol_abs, "newton.tol_abs");
      if (config.newton.max_iter < 1 || config.newton.load_steps < 1 ||
          config.newton.max_halvings < 0)
      {
         throw ConfigError("newton iteration counts out of range");
      }
   }

   read(root, "threads", config.threads);
   if (config.threads < 0)
   {
      throw ConfigError("threads must be >= 0 (0 = all available)");
   }
   read(root, "output_dir", config.output_dir);
   if (config.output_dir.empty())
   {
      throw ConfigError("output_dir must not be empty");
   }
   return config;
}

RunConfig load_run_config(const std::string &path)
{
   std::ifstream in(path);
   if (!in)
   {
      throw ConfigError("cannot open config file '" + path + "'");
   }
   std::ostringstream text;
   text << in.rdbuf();
   return parse_run_config(text.str());
}

} // namespace dgn
