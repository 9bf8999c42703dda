#pragma once

#include <gmpxx.h>

#include <string>

#include <json.hpp>

#include "manin/form.hpp"

namespace manin {

using ordered_json = nlohmann::ordered_json;

class FormParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rationals travel as decimal strings so arbitrary precision survives JSON.
ordered_json rational_to_json(const mpq_class& q);
mpq_class rational_from_json(const ordered_json& j);

ordered_json form_to_json(const TrilinearForm& f);
TrilinearForm form_from_json(const ordered_json& j);

// Throws FormParseError with a position/field diagnostic on malformed input.
TrilinearForm load_form_file(const std::string& path);
void save_form_file(const TrilinearForm& f, const std::string& path);

}  // namespace manin
