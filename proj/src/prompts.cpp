#include "agentcourt/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "agentcourt/errors.hpp"
#include "agentcourt/util.hpp"

namespace agentcourt {

namespace {

bool is_placeholder_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

// Returns the placeholder name starting after `open` (index of '{'), or
// empty when the braced span is not a placeholder.
std::string placeholder_at(const std::string& body, size_t open) {
    size_t i = open + 1;
    std::string name;
    while (i < body.size() && is_placeholder_char(body[i])) name.push_back(body[i++]);
    if (name.empty() || i >= body.size() || body[i] != '}') return "";
    return name;
}

const char* field_kind_name(FieldKind kind) {
    switch (kind) {
        case FieldKind::boolean: return "boolean";
        case FieldKind::string: return "string";
        case FieldKind::string_list: return "string_list";
        case FieldKind::object_list: return "object_list";
        case FieldKind::int_in_range: return "int_in_range";
    }
    return "string";
}

FieldKind field_kind_from_name(const std::string& name) {
    if (name == "boolean") return FieldKind::boolean;
    if (name == "string") return FieldKind::string;
    if (name == "string_list") return FieldKind::string_list;
    if (name == "object_list") return FieldKind::object_list;
    if (name == "int_in_range") return FieldKind::int_in_range;
    throw Error(ErrorKind::config, "unknown field kind '" + name + "'");
}

nlohmann::json spec_to_json(const StructureSpec& spec) {
    nlohmann::json fields = nlohmann::json::array();
    for (const auto& f : spec.fields) {
        nlohmann::json doc = {{"name", f.name}, {"kind", field_kind_name(f.kind)}};
        if (!f.required) doc["required"] = false;
        if (f.non_empty) doc["non_empty"] = true;
        if (f.min_int != std::numeric_limits<int>::min()) doc["min_int"] = f.min_int;
        if (f.max_int != std::numeric_limits<int>::max()) doc["max_int"] = f.max_int;
        if (f.min_items != 0) doc["min_items"] = f.min_items;
        if (f.max_items != std::numeric_limits<size_t>::max()) doc["max_items"] = f.max_items;
        fields.push_back(doc);
    }
    return {{"fields", fields}};
}

StructureSpec spec_from_json(const nlohmann::json& doc) {
    StructureSpec spec;
    for (const auto& f : doc.at("fields")) {
        FieldSpec field;
        field.name = f.at("name").get<std::string>();
        field.kind = field_kind_from_name(f.at("kind").get<std::string>());
        field.required = f.value("required", true);
        field.non_empty = f.value("non_empty", false);
        field.min_int = f.value("min_int", std::numeric_limits<int>::min());
        field.max_int = f.value("max_int", std::numeric_limits<int>::max());
        field.min_items = f.value("min_items", size_t{0});
        field.max_items = f.value("max_items", std::numeric_limits<size_t>::max());
        spec.fields.push_back(std::move(field));
    }
    spec.validate();
    return spec;
}

}  // namespace

std::vector<std::string> placeholder_names(const std::string& body) {
    std::vector<std::string> names;
    for (size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '{') continue;
        std::string name = placeholder_at(body, i);
        if (name.empty()) continue;
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
        i += name.size() + 1;
    }
    return names;
}

std::string render_template_body(const std::string& body,
                                 const std::map<std::string, std::string>& bindings,
                                 const std::string& template_id) {
    std::string out;
    out.reserve(body.size());
    for (size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '{') {
            std::string name = placeholder_at(body, i);
            if (!name.empty()) {
                auto it = bindings.find(name);
                if (it == bindings.end())
                    throw Error(ErrorKind::contract, "unbound placeholder '{" + name +
                                                         "}' in template '" + template_id + "'");
                out += it->second;
                i += name.size() + 1;
                continue;
            }
        }
        out.push_back(body[i]);
    }
    return out;
}

PromptRegistry PromptRegistry::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::missing_file, "cannot open prompt registry '" + path + "'");
    PromptRegistry registry;
    PromptTemplate current;
    bool in_record = false, in_body = false;
    std::vector<std::string> body_lines;
    auto flush = [&] {
        if (!in_record) return;
        while (!body_lines.empty() && trim(body_lines.back()).empty()) body_lines.pop_back();
        current.body = join(body_lines, "\n");
        if (current.body.empty())
            throw Error(ErrorKind::config, "template '" + current.id + "' has an empty body");
        registry.put(std::move(current));
        current = {};
        body_lines.clear();
        in_body = false;
    };
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("=== ", 0) == 0) {
            flush();
            in_record = true;
            current.id = trim(line.substr(4));
            continue;
        }
        if (!in_record) continue;  // header or comment lines
        if (in_body) {
            body_lines.push_back(line);
        } else if (line.rfind("role:", 0) == 0) {
            current.role = trim(line.substr(5));
        } else if (line.rfind("spec:", 0) == 0) {
            auto doc = nlohmann::json::parse(trim(line.substr(5)), nullptr, false);
            if (doc.is_discarded())
                throw Error(ErrorKind::config, "template '" + current.id + "' has malformed spec JSON");
            current.spec = spec_from_json(doc);
        } else if (trim(line) == "body:") {
            in_body = true;
        } else if (!trim(line).empty()) {
            throw Error(ErrorKind::config,
                        "unexpected line before body of template '" + current.id + "': " + line);
        }
    }
    flush();
    if (registry.size() == 0)
        throw Error(ErrorKind::config, "prompt registry '" + path + "' holds no templates");
    return registry;
}

void PromptRegistry::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write prompt registry '" + path + "'");
    out << "# prompt registry v1\n";
    for (const auto& [id, tmpl] : templates_) {
        out << "=== " << id << "\n";
        out << "role: " << tmpl.role << "\n";
        if (tmpl.spec) out << "spec: " << spec_to_json(*tmpl.spec).dump() << "\n";
        out << "body:\n" << tmpl.body << "\n";
    }
    if (!out) throw Error(ErrorKind::io, "write failed for prompt registry '" + path + "'");
}

bool PromptRegistry::has(const std::string& id) const { return templates_.count(id) > 0; }

const PromptTemplate& PromptRegistry::at(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw Error(ErrorKind::config, "no prompt template '" + id + "'");
    return it->second;
}

void PromptRegistry::put(PromptTemplate tmpl) {
    if (tmpl.id.empty()) throw Error(ErrorKind::config, "template id is empty");
    templates_[tmpl.id] = std::move(tmpl);
}

std::vector<std::string> PromptRegistry::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, tmpl] : templates_) out.push_back(id);
    return out;
}

std::string PromptRegistry::render(const std::string& id,
                                   const std::map<std::string, std::string>& bindings) const {
    return render_template_body(at(id).body, bindings, id);
}

}  // namespace agentcourt
