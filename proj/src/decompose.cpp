#include "sgp/decompose.hpp"

#include <algorithm>
#include <sstream>

namespace sgp {

namespace {

// Parses "key: value" lines from a stored descriptor record.
std::map<std::string, std::string> parse_stub(const std::string& content) {
    std::map<std::string, std::string> fields;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        const std::string key = canonical(line.substr(0, colon));
        if (key.empty() || fields.count(key)) continue;
        fields[key] = trim(line.substr(colon + 1));
    }
    return fields;
}

class StubImageEncoder : public MediaEncoder {
public:
    DecomposedArtifact decode(const Artifact& artifact) const override {
        auto fields = parse_stub(artifact.content);
        DecomposedArtifact out;
        out.artifact_id = artifact.artifact_id;
        out.modality = Modality::image;
        auto scene = fields.find("scene");
        out.text_view = scene != fields.end() ? scene->second : trim(artifact.content);
        if (out.text_view.empty()) out.text_view = "(unreadable image record)";
        auto tags = fields.find("tags");
        if (tags != fields.end()) out.descriptors["tags"] = tags->second;
        return out;
    }
    BackendFingerprint fingerprint() const override {
        return {"encoding", "offline", "stub-image", "0"};
    }
};

class StubAudioEncoder : public MediaEncoder {
public:
    explicit StubAudioEncoder(std::vector<std::string> vocab) : vocab_(std::move(vocab)) {}

    DecomposedArtifact decode(const Artifact& artifact) const override {
        auto fields = parse_stub(artifact.content);
        DecomposedArtifact out;
        out.artifact_id = artifact.artifact_id;
        out.modality = Modality::audio;
        auto transcript = fields.find("transcript");
        out.text_view = transcript != fields.end() ? transcript->second : trim(artifact.content);
        if (out.text_view.empty()) out.text_view = "(empty transcript)";
        for (const auto& key : vocab_) {
            auto it = fields.find(key);
            if (it != fields.end()) out.descriptors[key] = it->second;
        }
        return out;
    }
    BackendFingerprint fingerprint() const override {
        return {"encoding", "offline", "stub-audio", "0"};
    }

private:
    std::vector<std::string> vocab_;
};

}  // namespace

const EncoderSet& offline_encoders() {
    static const EncoderSet set = [] {
        EncoderSet s;
        static const StubImageEncoder image;
        static const StubAudioEncoder audio(s.audio_descriptor_vocab);
        s.image = &image;
        s.audio = &audio;
        return s;
    }();
    return set;
}

DecomposedArtifact decompose(const Artifact& artifact, const EncoderSet& encoders) {
    switch (artifact.modality) {
        case Modality::text: {
            DecomposedArtifact out;
            out.artifact_id = artifact.artifact_id;
            out.modality = Modality::text;
            out.text_view = artifact.content;  // passthrough, verbatim
            return out;
        }
        case Modality::image:
            if (encoders.image == nullptr) {
                throw DecomposeError("no image encoder configured for artifact '" +
                                     artifact.artifact_id + "'");
            }
            return encoders.image->decode(artifact);
        case Modality::audio:
            if (encoders.audio == nullptr) {
                throw DecomposeError("no audio encoder configured for artifact '" +
                                     artifact.artifact_id + "'");
            }
            return encoders.audio->decode(artifact);
    }
    throw DecomposeError("unknown modality");
}

std::vector<DecomposedArtifact> decompose_bundle(const ArtifactBundle& bundle,
                                                 const EncoderSet& encoders) {
    std::vector<DecomposedArtifact> out;
    out.reserve(bundle.size());
    for (const auto& a : bundle) out.push_back(decompose(a, encoders));
    return out;
}

std::string flatten_bundle(const std::vector<DecomposedArtifact>& decomposed,
                           const ArtifactBundle& bundle) {
    std::string out;
    for (size_t i = 0; i < decomposed.size(); ++i) {
        const auto& d = decomposed[i];
        std::string genre = "-";
        if (i < bundle.size()) {
            auto it = bundle[i].meta.find("genre");
            if (it != bundle[i].meta.end()) genre = it->second;
        }
        out += "[" + std::string(to_string(d.modality)) + " | " + genre + " | " +
               d.artifact_id + "]\n";
        out += d.text_view;
        if (!out.empty() && out.back() != '\n') out += '\n';
        for (const auto& [key, value] : d.descriptors) {
            out += key + ": " + value + "\n";
        }
        out += "\n";
    }
    return out;
}

std::string decompose_and_flatten(const ArtifactBundle& bundle, const EncoderSet& encoders) {
    return flatten_bundle(decompose_bundle(bundle, encoders), bundle);
}

}  // namespace sgp
