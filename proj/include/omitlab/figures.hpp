#pragma once

#include "omitlab/sweep.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace omitlab {

// A named bundle of sweeps that together regenerate one figure.
struct FigureRecipe {
    std::string id;
    std::string description;
    std::vector<SweepSpec> sweeps;
};

// Accepts either a recipe ({"sweeps": [...]}) or a single sweep spec.
FigureRecipe recipe_from_json(const nlohmann::json& j, const std::string& fallback_id = "sweep");
FigureRecipe load_recipe(const std::filesystem::path& path);

// Looks up `<dir>/<id>.json`. Throws InvalidSpec when it does not exist.
FigureRecipe find_recipe(const std::filesystem::path& dir, const std::string& id);

std::vector<std::string> list_recipes(const std::filesystem::path& dir);

// Compiled-in location of the bundled recipes.
std::filesystem::path default_figures_dir();

} // namespace omitlab
