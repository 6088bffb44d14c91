#include "omitlab/figures.hpp"

#include "omitlab/errors.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#ifndef OMITLAB_FIGURES_DIR
#define OMITLAB_FIGURES_DIR "figures"
#endif

namespace omitlab {

using nlohmann::json;

FigureRecipe recipe_from_json(const json& j, const std::string& fallback_id) {
    if (!j.is_object()) {
        throw InvalidSpec("recipe must be a JSON object");
    }
    FigureRecipe r;
    if (!j.contains("sweeps")) {
        r.id = j.value("name", fallback_id);
        r.sweeps.push_back(spec_from_json(j));
        if (r.sweeps.back().name.empty()) {
            r.sweeps.back().name = r.id;
        }
        return r;
    }
    for (const auto& [key, _] : j.items()) {
        if (key != "id" && key != "description" && key != "sweeps") {
            throw InvalidSpec("unknown recipe key '" + key + "'");
        }
    }
    try {
        r.id = j.value("id", fallback_id);
        r.description = j.value("description", std::string{});
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("recipe: ") + e.what());
    }
    const auto& sweeps = j.at("sweeps");
    if (!sweeps.is_array() || sweeps.empty()) {
        throw InvalidSpec("recipe '" + r.id + "': sweeps must be a non-empty array");
    }
    for (std::size_t k = 0; k < sweeps.size(); ++k) {
        auto spec = spec_from_json(sweeps[k]);
        if (spec.name.empty()) {
            spec.name = r.id + "_" + std::to_string(k);
        }
        r.sweeps.push_back(std::move(spec));
    }
    return r;
}

FigureRecipe load_recipe(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidSpec("cannot open " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::exception& e) {
        throw InvalidSpec(path.string() + ": " + e.what());
    }
    return recipe_from_json(j, path.stem().string());
}

FigureRecipe find_recipe(const std::filesystem::path& dir, const std::string& id) {
    const auto path = dir / (id + ".json");
    if (!std::filesystem::exists(path)) {
        std::string known;
        for (const auto& name : list_recipes(dir)) {
            known += (known.empty() ? "" : ", ") + name;
        }
        throw InvalidSpec("no recipe '" + id + "' in " + dir.string() + (known.empty() ? "" : " (have: " + known + ")"));
    }
    return load_recipe(path);
}

std::vector<std::string> list_recipes(const std::filesystem::path& dir) {
    std::vector<std::string> ids;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.path().extension() == ".json") {
            ids.push_back(entry.path().stem().string());
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::filesystem::path default_figures_dir() { return OMITLAB_FIGURES_DIR; }

} // namespace omitlab
