#pragma once

// CLI11 config formatter for JSON files. Top-level keys set options of the
// root command; an object keyed by a subcommand name sets that subcommand's
// options. Values given on the command line take precedence.

#include <istream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"

namespace amprlasso {

class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool /*write_description*/,
                          std::string /*prefix*/) const override {
        return to_json(app, default_also).dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            input >> j;
        } catch (const nlohmann::json::exception& e) {
            throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
        std::vector<CLI::ConfigItem> items;
        flatten(j, {}, items);
        return items;
    }

    /// Effective values of the app and its selected subcommands.
    static nlohmann::json to_json(const CLI::App* app, bool default_also) {
        nlohmann::json out = nlohmann::json::object();
        for (const CLI::Option* opt : app->get_options()) {
            const std::string name = opt->get_single_name();
            if (name.empty() || name == "help" || name == "config" || opt->get_lnames().empty()) continue;
            std::vector<std::string> values = opt->results();
            if (values.empty()) {
                if (!default_also || opt->get_default_str().empty()) continue;
                values = {opt->get_default_str()};
            }
            if (opt->get_expected_max() > 1 || values.size() > 1) {
                nlohmann::json arr = nlohmann::json::array();
                for (const auto& v : values) arr.push_back(scalar(v));
                out[name] = std::move(arr);
            } else {
                out[name] = scalar(values.front());
            }
        }
        for (const CLI::App* sub : app->get_subcommands()) {
            out[sub->get_name()] = to_json(sub, default_also);
        }
        return out;
    }

private:
    static nlohmann::json scalar(const std::string& text) {
        if (text == "true") return true;
        if (text == "false") return false;
        try {
            std::size_t used = 0;
            const long long n = std::stoll(text, &used);
            if (used == text.size()) return n;
            const double d = std::stod(text, &used);
            if (used == text.size()) return d;
        } catch (const std::exception&) {
        }
        return text;
    }

    static void flatten(const nlohmann::json& j, const std::vector<std::string>& parents,
                        std::vector<CLI::ConfigItem>& items) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                auto next = parents;
                next.push_back(key);
                flatten(value, next, items);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(text_of(v));
            } else {
                item.inputs.push_back(text_of(value));
            }
            items.push_back(std::move(item));
        }
    }

    static std::string text_of(const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_float()) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
            return buf;
        }
        return v.dump();
    }
};

}  // namespace amprlasso
