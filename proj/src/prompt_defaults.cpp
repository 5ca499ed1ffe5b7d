#include "agentcourt/prompts.hpp"

namespace agentcourt {

namespace {

FieldSpec boolean_field(const char* name) {
    FieldSpec f;
    f.name = name;
    f.kind = FieldKind::boolean;
    return f;
}

FieldSpec string_field(const char* name, bool non_empty = true) {
    FieldSpec f;
    f.name = name;
    f.kind = FieldKind::string;
    f.non_empty = non_empty;
    return f;
}

FieldSpec list_field(const char* name, size_t min_items = 0,
                     size_t max_items = std::numeric_limits<size_t>::max()) {
    FieldSpec f;
    f.name = name;
    f.kind = FieldKind::string_list;
    f.min_items = min_items;
    f.max_items = max_items;
    return f;
}

FieldSpec object_list_field(const char* name) {
    FieldSpec f;
    f.name = name;
    f.kind = FieldKind::object_list;
    return f;
}

FieldSpec int_field(const char* name, int min_int = std::numeric_limits<int>::min(),
                    int max_int = std::numeric_limits<int>::max()) {
    FieldSpec f;
    f.name = name;
    f.kind = FieldKind::int_in_range;
    f.min_int = min_int;
    f.max_int = max_int;
    return f;
}

PromptTemplate make(const char* id, const char* role, const char* body,
                    std::optional<StructureSpec> spec = std::nullopt) {
    return {id, role, body, std::move(spec)};
}

}  // namespace

PromptRegistry PromptRegistry::defaults() {
    PromptRegistry r;

    r.put(make("lawyer.plan", "lawyer",
               R"({role_desc} As an experienced legal professional, analyze the court history and determine required information sources.

Court history:
{court_history}

Return format: {'experience': bool, 'case': bool, 'legal': bool})",
               StructureSpec{{boolean_field("experience"), boolean_field("case"),
                              boolean_field("legal")}}));

    r.put(make("lawyer.query.experience", "lawyer",
               R"({role_desc} Based on the court history, analyze required experience information. Identify key points and formulate a query to retrieve relevant experiences for improving logic.

Court history:
{court_history}

Return format: {'query': 'specific query string'})",
               StructureSpec{{string_field("query")}}));

    r.put(make("lawyer.query.case", "lawyer",
               R"({role_desc} Based on the court history, analyze required case precedents. Identify key points and formulate a query to retrieve relevant cases for improving agility.

Court history:
{court_history}

Return format: {'query': 'specific query string'})",
               StructureSpec{{string_field("query")}}));

    r.put(make("lawyer.query.legal", "lawyer",
               R"({role_desc} Based on the court history, analyze required legal information. Identify relevant laws/regulations and formulate a query to retrieve legal references.

Court history:
{court_history}

Return format: {'query': 'specific query string'})",
               StructureSpec{{string_field("query")}}));

    r.put(make("lawyer.respond", "lawyer",
               R"({role_desc} Continue the proceedings on behalf of your client.

Case background:
{case_background}

Court history:
{court_history}

Retrieved references:
{retrieved_block}

Guidelines:
1. Avoid repeating previous arguments
2. Build upon previous points with new perspectives
3. Respond directly to opponent's latest arguments
4. Introduce new supporting evidence when possible
5. Vary expression and argumentation approach

Deliver your next statement to the court.)"));

    r.put(make("judge.opening", "judge",
               R"({role_desc} Formally open the session and verify the identities and qualifications of the litigation participants.

Case background:
{case_background}

Court history:
{court_history})"));

    r.put(make("judge.summary", "judge",
               R"({role_desc} Based on the statements from both plaintiff's and defendant's attorneys, summarize the key points for debate. Your summary should be concise and practical while adhering to reality.

Court history:
{court_history})"));

    r.put(make("judge.verdict", "judge",
               R"({role_desc} Please make your judgment: (Your decision should align with realistic circumstances.)

Court history:
{court_history})"));

    r.put(make("clerk.announce", "clerk",
               R"({role_desc} Announce the court discipline to establish trial order and declare the session open.

Case background:
{case_background})"));

    r.put(make("clerk.archive", "clerk",
               R"({role_desc} The judgment has been rendered. Complete the trial records for archiving and declare the session closed.

Court history:
{court_history})"));

    r.put(make("litigant.plaintiff", "litigant",
               R"({role_desc} State your claim to the court in your own words, staying faithful to your filed complaint.

Complaint:
{complaint})"));

    r.put(make("litigant.defendant", "litigant",
               R"({role_desc} State your defense to the court in your own words, staying faithful to your filed defense statement.

Defense statement:
{defense})"));

    r.put(make("evolve.law.extract", "lawyer",
               R"(Extract all law citations from the response, including:
1. Explicit legal provisions (e.g., Article X)
2. Implicit legal references
3. Specific legal clauses mentioned

Court history:
{court_history}

Return format: {'laws': [{'content', 'purpose', 'issue', 'source'}]})",
               StructureSpec{{object_list_field("laws")}}));

    r.put(make("evolve.law.reflect", "lawyer",
               R"(Beyond the provisions already cited, identify potentially relevant provisions that this dispute implicates but the parties did not cite.

Court history:
{court_history}

Return format: {'laws': [{'content', 'purpose', 'issue', 'source'}]})",
               StructureSpec{{object_list_field("laws")}}));

    r.put(make("evolve.law.effectiveness", "lawyer",
               R"(Evaluate the effectiveness of legal provision usage:
1. Relevance to the issue
2. Persuasiveness of argumentation
3. Effectiveness of opponent's response
4. Overall impact

Provision under review:
{entry_text}

Court history:
{court_history}

Return format: {'relevance_score', 'persuasiveness_score', 'response_effectiveness', 'overall_effectiveness', 'analysis', 'improvement_suggestions'})",
               StructureSpec{{int_field("relevance_score"), int_field("persuasiveness_score"),
                              int_field("response_effectiveness"), int_field("overall_effectiveness"),
                              string_field("analysis", false), list_field("improvement_suggestions")}}));

    r.put(make("evolve.law.opponent_usage", "lawyer",
               R"({role_desc} Analyze opponent's legal provision usage and extract:
- Law content
- Usage method
- Application effectiveness

Court history:
{court_history}

Return format: {'laws': [{'content', 'usage_method', 'effectiveness'}]})",
               StructureSpec{{object_list_field("laws")}}));

    r.put(make("evolve.law.opponent_eval", "lawyer",
               R"({role_desc} Evaluate opponent's excellence in:
1. Professional law selection
2. Logical argumentation
3. Expression techniques

Court history:
{court_history}

Return format: {'professionalism_score', 'logic_score', 'expression_score', 'overall_score', 'learning_points', 'applicable_scenarios'})",
               StructureSpec{{int_field("professionalism_score"), int_field("logic_score"),
                              int_field("expression_score"), int_field("overall_score"),
                              list_field("learning_points"), list_field("applicable_scenarios")}}));

    r.put(make("evolve.experience.self", "lawyer",
               R"({role_desc} Reflect on this court session from your own side's perspective.

Case background:
{case_background}

Court history:
{court_history}

Generate a logically coherent experience summary including:
1. Case background description
2. Logic-focused experience description
3. 3-5 key points for practical application
4. 3-5 guidelines for maintaining logical coherence
Return format: {'context', 'content', 'focus_points', 'guidelines'})",
               StructureSpec{{string_field("context"), string_field("content"),
                              list_field("focus_points", 3, 5), list_field("guidelines", 3, 5)}}));

    r.put(make("evolve.experience.opponent", "lawyer",
               R"({role_desc} Summarize learnings from opponent's performance:
1. Legal provision application techniques
2. Argumentation construction methods
3. Persuasive expression points

Key dispute points:
{key_points}

Court history:
{court_history}

Generate a logically coherent experience summary including:
1. Case background description
2. Logic-focused experience description
3. 3-5 key points for practical application
4. 3-5 guidelines for maintaining logical coherence
Return format: {'context', 'content', 'focus_points', 'guidelines'})",
               StructureSpec{{string_field("context"), string_field("content"),
                              list_field("focus_points", 3, 5), list_field("guidelines", 3, 5)}}));

    r.put(make("evolve.case.distill", "lawyer",
               R"(Generate a concise case summary for agile response:
1. Case name and background
2. Case type (e.g., labor dispute, contract dispute)
3. 3-5 essential keywords
4. 3-5 quick reaction points
5. 3-5 response directions

Key dispute points:
{key_points}

Court history:
{court_history}

Return format: {'content', 'case_type', 'keywords', 'quick_reaction_points', 'response_directions'})",
               StructureSpec{{string_field("content"), string_field("case_type"),
                              list_field("keywords"), list_field("quick_reaction_points"),
                              list_field("response_directions")}}));

    r.put(make("eval.debate", "evaluator",
               R"(As a senior legal expert, please evaluate the following court debate across three dimensions:
1. Cognitive Agility: depth of understanding, response speed, and accuracy
2. Professional Knowledge: expertise in legal knowledge and application
3. Logical Rigor: completeness of argumentation and reasoning structure

Court debate:
{court_history}

Return format: {'cognitive_agility': 1/0/-1, 'professional_knowledge': 1/0/-1, 'logical_rigor': 1/0/-1, 'overall': 1/0/-1}
where 1 = plaintiff wins, 0 = tie, -1 = defendant wins.)",
               StructureSpec{{int_field("cognitive_agility", -1, 1),
                              int_field("professional_knowledge", -1, 1),
                              int_field("logical_rigor", -1, 1), int_field("overall", -1, 1)}}));

    r.put(make("bench.base", "evaluator",
               R"(As a senior legal expert, please select the most appropriate answer based on the following case information:
- Case Background: {background}
- Court Process: {court_process}
- Current Focus: {focus}
- Question: {question}
- Options:
{options}

Return format: Single letter (A/B/C/D).)"));

    r.put(make("bench.enhanced", "evaluator",
               R"(As a senior legal expert, please select the most appropriate answer based on the following case information:
- Case Background: {background}
- Court Process: {court_process}
- Current Focus: {focus}
- Question: {question}
- Options:
{options}

Professional Knowledge Reference: {reference}

Return format: Single letter (A/B/C/D).)"));

    return r;
}

}  // namespace agentcourt
