// Copyright 2026 The tablevec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <unordered_set>

#include "tablevec/common.hpp"

namespace tablevec {

// English stoplist, version 1. Mirrors data/stopwords-en-v1.txt line for line.
inline constexpr std::string_view kStopwordsVersion = "en-v1";

inline constexpr std::array<std::string_view, 514> kDefaultStopwords = {
    "a", "able", "about", "above", "according", "accordingly", "across",
    "actually", "after", "afterwards", "again", "against", "ago", "ahead",
    "all", "allow", "allows", "almost", "alone", "along", "already", "also",
    "although", "always", "am", "among", "amongst", "an", "and", "another",
    "any", "anyhow", "anyone", "anything", "anyway", "anywhere", "apart",
    "appear", "appreciate", "appropriate", "are", "around", "as", "aside",
    "ask", "asking", "associated", "at", "available", "away", "awfully", "back",
    "be", "became", "because", "become", "becomes", "becoming", "been",
    "before", "beforehand", "behind", "being", "believe", "below", "beside",
    "besides", "best", "better", "between", "beyond", "both", "brief", "but",
    "by", "came", "can", "cannot", "cant", "cause", "causes", "certain",
    "certainly", "changes", "clearly", "co", "com", "come", "comes",
    "concerning", "consequently", "consider", "considering", "contain",
    "containing", "contains", "corresponding", "could", "couldnt", "course",
    "currently", "de", "definitely", "despite", "did", "didnt", "different",
    "do", "does", "doesnt", "doing", "done", "dont", "down", "downwards", "due",
    "during", "each", "edu", "eg", "eight", "either", "eleven", "else",
    "elsewhere", "enough", "entirely", "especially", "et", "etc", "even",
    "ever", "every", "everyone", "everything", "everywhere", "exactly",
    "example", "except", "far", "few", "fifteen", "fifty", "five", "followed",
    "following", "follows", "for", "former", "formerly", "forth", "forty",
    "four", "from", "further", "furthermore", "get", "gets", "getting", "give",
    "given", "gives", "go", "goes", "going", "gone", "got", "gotten",
    "greetings", "had", "happens", "hardly", "has", "hasnt", "have", "having",
    "he", "hello", "help", "hence", "her", "here", "hereafter", "hereby",
    "herein", "hereupon", "hers", "herself", "hi", "him", "himself", "his",
    "hither", "hopefully", "how", "howbeit", "however", "hundred", "i", "ie",
    "if", "ignored", "immediate", "in", "inasmuch", "inc", "indeed", "indicate",
    "indicated", "indicates", "inner", "insofar", "instead", "into", "inward",
    "is", "isnt", "it", "itd", "its", "itself", "ive", "just", "kept", "know",
    "known", "knows", "last", "lately", "later", "latter", "latterly", "least",
    "less", "lest", "let", "lets", "like", "liked", "likely", "little", "look",
    "looking", "looks", "ltd", "made", "mainly", "many", "may", "maybe", "me",
    "mean", "meanwhile", "merely", "might", "mine", "more", "moreover", "most",
    "mostly", "much", "must", "my", "myself", "n", "namely", "nd", "near",
    "nearly", "necessary", "need", "needs", "neither", "never", "nevertheless",
    "next", "nine", "no", "nobody", "non", "none", "noone", "nor", "normally",
    "not", "nothing", "now", "nowhere", "obviously", "of", "off", "often", "oh",
    "ok", "okay", "on", "once", "one", "ones", "only", "onto", "or", "other",
    "others", "otherwise", "ought", "our", "ours", "ourselves", "out",
    "outside", "over", "overall", "own", "particular", "particularly", "per",
    "perhaps", "placed", "please", "plus", "possible", "presumably", "probably",
    "provides", "put", "que", "quite", "qv", "rather", "rd", "re", "really",
    "reasonably", "regarding", "regardless", "regards", "relatively",
    "respectively", "right", "said", "same", "saw", "say", "saying", "says",
    "secondly", "see", "seeing", "seem", "seemed", "seeming", "seems", "seen",
    "self", "selves", "sensible", "sent", "seriously", "seven", "several",
    "shall", "she", "should", "since", "six", "sixty", "so", "some", "somebody",
    "somehow", "someone", "something", "sometime", "sometimes", "somewhat",
    "somewhere", "soon", "sorry", "specified", "specify", "specifying", "still",
    "sub", "such", "sup", "sure", "t", "take", "ten", "th", "than", "thank",
    "thanks", "thanx", "that", "thats", "the", "their", "theirs", "them",
    "themselves", "then", "thence", "there", "thereafter", "thereby",
    "therefore", "therein", "theres", "thereupon", "these", "they", "think",
    "this", "thoroughly", "those", "though", "three", "through", "throughout",
    "thru", "thus", "to", "together", "too", "took", "toward", "towards",
    "tried", "tries", "truly", "try", "trying", "twelve", "twenty", "twice",
    "two", "un", "under", "unfortunately", "unless", "unlikely", "until",
    "unto", "up", "upon", "us", "use", "used", "useful", "uses", "using",
    "usually", "various", "very", "via", "viz", "vs", "want", "wants", "was",
    "wasnt", "way", "we", "welcome", "well", "went", "were", "werent", "what",
    "whatever", "whats", "when", "whence", "whenever", "where", "whereafter",
    "whereas", "whereby", "wherein", "wheres", "whereupon", "wherever",
    "whether", "which", "while", "whither", "who", "whoever", "whole", "whom",
    "whos", "whose", "why", "will", "wish", "with", "within", "without",
    "wonder", "would", "yes", "yet", "you", "youd", "youll", "your", "youre",
    "yours", "yourself", "yourselves", "youve", "zero",
};

using StopwordSet = std::unordered_set<std::string>;

inline StopwordSet DefaultStopwords() {
  StopwordSet out;
  for (auto w : kDefaultStopwords) out.emplace(w);
  return out;
}

// One word per line; blank lines and "#" comments are ignored.
inline StopwordSet LoadStopwords(const std::string &path) {
  auto in = OpenInput(path);
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    line = StripCr(line);
    if (line.empty() || line[0] == '#') continue;
    out.insert(line);
  }
  return out;
}

}  // namespace tablevec
