// Built-in default schema and cue table. data/default_schema.json and
// data/cue_phrases.json ship the same documents for CLI use; a unit test pins
// the file and embedded copies to the same fingerprint.

#include <string>

#include "sgp/ontology.hpp"

namespace sgp {

const std::string& default_schema_json() {
    static const std::string text = R"JSON({
  "kinds": [
    {"id": "person", "stratum": "participants",
     "vocabulary": ["elise", "ben", "priya", "marcus", "sofia", "daniel", "amara", "jonas",
                    "mei", "carlos", "nadia", "tom", "yuki", "omar", "grace", "leo"]},
    {"id": "role", "stratum": "participants",
     "vocabulary": ["analyst", "manager", "mentor", "recruiter", "teammate", "client",
                    "trainer", "physician", "friend", "neighbor"]},
    {"id": "organization", "stratum": "participants",
     "vocabulary": ["flowtech", "brightlabs", "citygym", "northclinic", "bookclub",
                    "alumni_network", "startup_hub", "community_center", "riverside_cafe",
                    "marketing_guild"]},
    {"id": "event", "stratum": "spatio_temporal",
     "vocabulary": ["interview", "team_meeting", "product_launch", "deadline_review",
                    "birthday_dinner", "gym_session", "doctor_visit", "road_trip",
                    "conference", "workshop", "family_call", "apartment_move", "marathon",
                    "reunion"]},
    {"id": "location_type", "stratum": "spatio_temporal",
     "vocabulary": ["office", "home", "gym", "clinic", "cafe", "park", "conference_hall",
                    "airport", "restaurant", "library", "studio", "rooftop"]},
    {"id": "time_of_day", "stratum": "spatio_temporal",
     "vocabulary": ["early_morning", "morning", "midday", "afternoon", "evening",
                    "late_night"]},
    {"id": "activity", "stratum": "contextual_atmosphere",
     "vocabulary": ["presentation", "coding", "budgeting", "brainstorm", "running", "yoga",
                    "cooking", "reading", "networking", "packing", "rehearsal", "screening",
                    "journaling", "mentoring"]},
    {"id": "ambience", "stratum": "contextual_atmosphere",
     "vocabulary": ["quiet", "bustling", "tense", "festive", "cozy", "formal", "chaotic",
                    "serene", "crowded", "dim", "bright", "airy"]},
    {"id": "social_context", "stratum": "contextual_atmosphere",
     "vocabulary": ["professional", "familial", "friendly", "romantic", "medical",
                    "communal", "competitive", "ceremonial", "casual", "academic",
                    "supportive", "transactional"]},
    {"id": "emotion", "stratum": "psychological",
     "vocabulary": ["joy", "sadness", "anger", "fear", "stressed", "calm"]},
    {"id": "valence", "stratum": "psychological",
     "vocabulary": ["positive", "negative"]}
  ],
  "predicates": [
    {"id": "has_participant", "latent": false, "arity": [["event", "person"]]},
    {"id": "has_role", "latent": false, "arity": [["person", "role"]]},
    {"id": "affiliated_with", "latent": false, "arity": [["person", "organization"]]},
    {"id": "occurs_at", "latent": false, "arity": [["event", "location_type"]]},
    {"id": "occurs_during", "latent": false, "arity": [["event", "time_of_day"]]},
    {"id": "involves_activity", "latent": false, "arity": [["event", "activity"]]},
    {"id": "has_ambience", "latent": false,
     "arity": [["event", "ambience"], ["location_type", "ambience"]]},
    {"id": "has_context", "latent": false, "arity": [["event", "social_context"]]},
    {"id": "interacts_with", "latent": false, "arity": [["person", "person"]]},
    {"id": "part_of", "latent": false, "arity": [["activity", "event"]]},
    {"id": "feels", "latent": true, "arity": [["person", "emotion"]]},
    {"id": "evokes", "latent": true, "arity": [["event", "emotion"], ["ambience", "emotion"]]},
    {"id": "has_valence", "latent": true, "arity": [["emotion", "valence"]]},
    {"id": "conveys_val", "latent": true,
     "arity": [["ambience", "valence"], ["social_context", "valence"]]}
  ],
  "min_triplets": 6,
  "max_triplets": 18,
  "completeness_rules": [
    {"type": "predicate", "id": "has_participant"},
    {"type": "predicate", "id": "occurs_at"},
    {"type": "predicate", "id": "feels"},
    {"type": "predicate", "id": "has_valence"}
  ]
})JSON";
    return text;
}

const std::string& default_cue_table_json() {
    static const std::string text = R"JSON({
  "joy": ["can't stop smiling", "what a great day", "feeling on top of the world"],
  "sadness": ["feeling pretty down", "heavy heart today", "couldn't shake the blues"],
  "anger": ["absolutely fuming", "this is infuriating", "so fed up right now"],
  "fear": ["dreading what comes next", "knot in my stomach", "keep expecting the worst"],
  "stressed": ["deadline pressure", "stretched way too thin", "running on fumes"],
  "calm": ["feeling settled", "nice and unhurried", "no rush at all today"],
  "positive": ["things are looking up", "grateful for this", "a genuinely good sign"],
  "negative": ["this keeps getting worse", "hard to see the upside", "wish this would stop"]
})JSON";
    return text;
}

}  // namespace sgp
