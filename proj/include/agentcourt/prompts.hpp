#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentcourt/gateway.hpp"

namespace agentcourt {

// One registry record. `body` may reference {placeholder} slots; `spec`
// describes the JSON reply shape when the template expects structured output.
struct PromptTemplate {
    std::string id;
    std::string role;  // owning role family: lawyer, judge, clerk, litigant, evaluator
    std::string body;
    std::optional<StructureSpec> spec;
};

// Placeholder slots are {lower_snake} tokens; anything else in braces is
// literal text (the JSON return-format examples rely on this).
std::vector<std::string> placeholder_names(const std::string& body);

// Substitutes every placeholder from `bindings`; an unbound placeholder is a
// contract error naming the template.
std::string render_template_body(const std::string& body,
                                 const std::map<std::string, std::string>& bindings,
                                 const std::string& template_id);

// Editable template registry keyed by id. Shipped defaults cover the lawyer
// planning/query/response pipeline, judge and clerk turns, the three
// knowledge reflection families, and both evaluation tracks.
class PromptRegistry {
public:
    static PromptRegistry defaults();
    static PromptRegistry load_file(const std::string& path);
    void save_file(const std::string& path) const;

    bool has(const std::string& id) const;
    const PromptTemplate& at(const std::string& id) const;
    void put(PromptTemplate tmpl);
    std::vector<std::string> ids() const;
    size_t size() const { return templates_.size(); }

    std::string render(const std::string& id,
                       const std::map<std::string, std::string>& bindings) const;

private:
    std::map<std::string, PromptTemplate> templates_;
};

}  // namespace agentcourt
