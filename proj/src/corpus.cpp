#include "sgp/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "sgp/ontology.hpp"

namespace sgp {

using nlohmann::json;

std::string_view to_string(Modality m) {
    switch (m) {
        case Modality::text: return "text";
        case Modality::image: return "image";
        case Modality::audio: return "audio";
    }
    return "text";
}

std::optional<Modality> modality_from_string(std::string_view s) {
    if (s == "text") return Modality::text;
    if (s == "image") return Modality::image;
    if (s == "audio") return Modality::audio;
    return std::nullopt;
}

const Instance* Corpus::find_instance(std::string_view instance_id) const {
    for (const auto& inst : instances) {
        if (inst.instance_id == instance_id) return &inst;
    }
    return nullptr;
}

size_t Corpus::artifact_count() const {
    size_t n = 0;
    for (const auto& inst : instances) n += inst.artifacts.size();
    return n;
}

const std::vector<std::string>& default_domains() {
    static const std::vector<std::string> domains = {
        "professional", "personal_lifestyle", "health_physical", "social_relational"};
    return domains;
}

std::map<std::string, std::string> default_persona() {
    return {{"name", "Elise Navarro"},
            {"age", "28"},
            {"city", "Toronto"},
            {"occupation", "Senior Marketing Analyst"}};
}

namespace {

json instance_to_json(const Instance& inst) {
    json artifacts = json::array();
    for (const auto& a : inst.artifacts) {
        artifacts.push_back({{"artifact_id", a.artifact_id},
                             {"modality", std::string(to_string(a.modality))},
                             {"content", a.content},
                             {"meta", a.meta}});
    }
    json gold = json::array();
    for (const auto& t : inst.gold.triplets) {
        gold.push_back({t.subject.kind, t.subject.name, t.predicate, t.object.kind,
                        t.object.name});
    }
    return {{"instance_id", inst.instance_id},
            {"time_index", inst.time_index},
            {"domain", inst.domain},
            {"artifacts", artifacts},
            {"gold", gold}};
}

[[noreturn]] void fail_line(size_t line, const std::string& what) {
    throw CorpusError("line " + std::to_string(line) + ": " + what);
}

Instance instance_from_json(const json& j, size_t line) {
    if (!j.is_object()) fail_line(line, "expected an instance object");
    Instance inst;
    try {
        inst.instance_id = j.at("instance_id").get<std::string>();
        inst.time_index = j.at("time_index").get<int>();
        inst.domain = canonical(j.at("domain").get<std::string>());
        for (const auto& ja : j.at("artifacts")) {
            Artifact a;
            a.artifact_id = ja.at("artifact_id").get<std::string>();
            auto modality = modality_from_string(ja.at("modality").get<std::string>());
            if (!modality) fail_line(line, "unknown modality in field 'modality'");
            a.modality = *modality;
            a.content = ja.at("content").get<std::string>();
            if (a.content.empty()) fail_line(line, "empty artifact content");
            if (ja.contains("meta")) {
                a.meta = ja.at("meta").get<std::map<std::string, std::string>>();
            }
            inst.artifacts.push_back(std::move(a));
        }
        for (const auto& jt : j.at("gold")) {
            if (!jt.is_array() || jt.size() != 5) {
                fail_line(line, "gold triplet must be a 5-element array");
            }
            inst.gold.triplets.emplace_back(
                Node(jt[0].get<std::string>(), jt[1].get<std::string>()),
                jt[2].get<std::string>(),
                Node(jt[3].get<std::string>(), jt[4].get<std::string>()));
        }
    } catch (const json::exception& e) {
        fail_line(line, std::string("malformed instance record: ") + e.what());
    }
    inst.gold.instance_id = inst.instance_id;
    inst.gold.time_index = inst.time_index;
    return inst;
}

}  // namespace

void write_corpus(const Corpus& c, std::ostream& out) {
    int last_time = -1;
    for (const auto& inst : c.instances) {
        if (inst.time_index <= last_time) {
            throw CorpusError("instance '" + inst.instance_id +
                              "': time_index not strictly increasing");
        }
        last_time = inst.time_index;
    }
    json header = {{"persona", c.persona},
                   {"schema_fingerprint", c.schema_fingerprint},
                   {"domain_list", c.domain_list}};
    out << header.dump() << '\n';
    for (const auto& inst : c.instances) out << instance_to_json(inst).dump() << '\n';
}

void write_corpus_file(const Corpus& c, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw CorpusError(path + ": cannot open for writing");
        write_corpus(c, out);
        if (!out) throw CorpusError(path + ": write failed");
    }
    std::filesystem::rename(tmp, path);
}

Corpus read_corpus(std::istream& in, const SchemaDef* schema) {
    Corpus c;
    std::string line;
    size_t line_no = 0;
    if (!std::getline(in, line)) throw CorpusError("empty corpus file (missing header)");
    ++line_no;
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.is_object()) fail_line(line_no, "malformed header");
    try {
        if (header.contains("persona")) {
            c.persona = header.at("persona").get<std::map<std::string, std::string>>();
        }
        c.schema_fingerprint = header.value("schema_fingerprint", std::string());
        if (header.contains("domain_list")) {
            c.domain_list = header.at("domain_list").get<std::vector<std::string>>();
        }
    } catch (const json::exception& e) {
        fail_line(line_no, std::string("malformed header: ") + e.what());
    }
    if (c.domain_list.empty()) c.domain_list = default_domains();
    if (schema != nullptr && schema->fingerprint() != c.schema_fingerprint) {
        throw CorpusError("schema fingerprint mismatch: corpus has '" + c.schema_fingerprint +
                          "', schema is '" + schema->fingerprint() + "'");
    }

    int last_time = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) fail_line(line_no, "not valid JSON");
        Instance inst = instance_from_json(j, line_no);
        if (std::find(c.domain_list.begin(), c.domain_list.end(), inst.domain) ==
            c.domain_list.end()) {
            fail_line(line_no, "unknown domain '" + inst.domain + "' in field 'domain'");
        }
        if (inst.time_index <= last_time) {
            fail_line(line_no, "time_index not strictly increasing");
        }
        last_time = inst.time_index;
        c.instances.push_back(std::move(inst));
    }
    return c;
}

Corpus read_corpus_file(const std::string& path, const SchemaDef* schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorpusError(path + ": cannot open file");
    return read_corpus(in, schema);
}

}  // namespace sgp
