"""Closed-class tables and a small open-class lexicon for the rule backend.

Coverage targets short child-directed and child speech: pronouns,
auxiliaries, wh-words, common verbs with their irregular forms, household
nouns, and basic adjectives/adverbs. Unknown words fall back to noun.
"""

from __future__ import annotations

PUNCT = {".": ".", "?": ".", "!": ".", ",": ",", ";": ":", ":": ":"}

PRP = {"i", "you", "he", "she", "it", "we", "they",
       "me", "him", "her", "us", "them", "myself", "yourself"}
PRP_DOLLAR = {"my", "your", "his", "its", "our", "their"}  # "her" handled by context
DT = {"the", "a", "an", "this", "these", "those", "some", "any", "every",
      "each", "another", "no"}
WP = {"who", "whom", "what"}
WDT = {"which"}
WP_DOLLAR = {"whose"}
WRB = {"when", "where", "why", "how"}
MD = {"can", "could", "will", "would", "shall", "should", "may", "might",
      "must", "'ll", "'d"}
CC = {"and", "or", "but"}
UH = {"yes", "no", "yeah", "oh", "uh", "um", "hm", "hmm", "okay", "ok", "hi",
      "hello", "bye", "wow", "ouch", "huh", "please", "thanks"}
IN = {"in", "on", "at", "by", "with", "for", "from", "of", "under", "over",
      "about", "into", "near", "behind", "after", "before", "around",
      "inside", "outside", "off", "up", "down", "out", "because", "whether",
      "if", "that"}
RB = {"not", "n't", "very", "really", "too", "now", "here", "there", "again",
      "away", "always", "never", "just", "soon", "today", "tomorrow",
      "yesterday", "together", "back", "so"}

# copula and auxiliary verb forms: form -> (tag, lemma)
BE_FORMS = {
    "am": ("VBP", "be"), "is": ("VBZ", "be"), "are": ("VBP", "be"),
    "was": ("VBD", "be"), "were": ("VBD", "be"), "be": ("VB", "be"),
    "been": ("VBN", "be"), "being": ("VBG", "be"),
    "'s": ("VBZ", "be"), "'m": ("VBP", "be"), "'re": ("VBP", "be"),
}
DO_FORMS = {"do": ("VBP", "do"), "does": ("VBZ", "do"), "did": ("VBD", "do")}
HAVE_FORMS = {"have": ("VBP", "have"), "has": ("VBZ", "have"),
              "had": ("VBD", "have"), "'ve": ("VBP", "have")}

# verb lemma -> (3sg, past, past participle, gerund); regular unless listed
_IRREGULAR_VERBS = {
    "go": ("goes", "went", "gone", "going"),
    "see": ("sees", "saw", "seen", "seeing"),
    "eat": ("eats", "ate", "eaten", "eating"),
    "run": ("runs", "ran", "run", "running"),
    "make": ("makes", "made", "made", "making"),
    "take": ("takes", "took", "taken", "taking"),
    "give": ("gives", "gave", "given", "giving"),
    "get": ("gets", "got", "gotten", "getting"),
    "put": ("puts", "put", "put", "putting"),
    "come": ("comes", "came", "come", "coming"),
    "say": ("says", "said", "said", "saying"),
    "tell": ("tells", "told", "told", "telling"),
    "know": ("knows", "knew", "known", "knowing"),
    "think": ("thinks", "thought", "thought", "thinking"),
    "teach": ("teaches", "taught", "taught", "teaching"),
    "sing": ("sings", "sang", "sung", "singing"),
    "sit": ("sits", "sat", "sat", "sitting"),
    "sleep": ("sleeps", "slept", "slept", "sleeping"),
    "find": ("finds", "found", "found", "finding"),
    "build": ("builds", "built", "built", "building"),
    "draw": ("draws", "drew", "drawn", "drawing"),
    "throw": ("throws", "threw", "thrown", "throwing"),
    "catch": ("catches", "caught", "caught", "catching"),
    "hold": ("holds", "held", "held", "holding"),
    "hear": ("hears", "heard", "heard", "hearing"),
    "forget": ("forgets", "forgot", "forgotten", "forgetting"),
    "understand": ("understands", "understood", "understood", "understanding"),
    "bring": ("brings", "brought", "brought", "bringing"),
    "buy": ("buys", "bought", "bought", "buying"),
    "write": ("writes", "wrote", "written", "writing"),
    "drink": ("drinks", "drank", "drunk", "drinking"),
    "break": ("breaks", "broke", "broken", "breaking"),
    "fall": ("falls", "fell", "fallen", "falling"),
    "read": ("reads", "read", "read", "reading"),
    "win": ("wins", "won", "won", "winning"),
    "hit": ("hits", "hit", "hit", "hitting"),
    "hide": ("hides", "hid", "hidden", "hiding"),
    "fly": ("flies", "flew", "flown", "flying"),
    "leave": ("leaves", "left", "left", "leaving"),
    "swim": ("swims", "swam", "swum", "swimming"),
    "hurt": ("hurts", "hurt", "hurt", "hurting"),
    "wake": ("wakes", "woke", "woken", "waking"),
    "spill": ("spills", "spilled", "spilled", "spilling"),
}
_REGULAR_VERBS = [
    "want", "like", "love", "play", "jump", "chase", "praise", "smile",
    "look", "help", "wash", "push", "pull", "open", "close", "watch",
    "show", "wonder", "remember", "ask", "guess", "figure", "decide",
    "dance", "walk", "talk", "cry", "laugh", "kiss", "hug", "clean",
    "fix", "drop", "pick", "call", "need", "feed", "climb", "color",
    "count", "cook", "bake", "point", "wait", "stay", "try", "start",
    "stop", "turn", "happen", "listen", "live", "move", "share", "visit",
    "arrive",
]


def _regular_forms(lemma: str) -> tuple[str, str, str, str]:
    if lemma.endswith(("s", "sh", "ch", "x")):
        third = lemma + "es"
    elif lemma.endswith("y") and lemma[-2] not in "aeiou":
        third = lemma[:-1] + "ies"
    else:
        third = lemma + "s"
    if lemma.endswith("e"):
        past = lemma + "d"
        gerund = lemma[:-1] + "ing"
    elif lemma.endswith("y") and lemma[-2] not in "aeiou":
        past = lemma[:-1] + "ied"
        gerund = lemma + "ing"
    elif lemma in ("stop", "drop", "hug", "pat", "clap", "grab"):
        past = lemma + lemma[-1] + "ed"
        gerund = lemma + lemma[-1] + "ing"
    else:
        past = lemma + "ed"
        gerund = lemma + "ing"
    return third, past, past, gerund


def _build_verb_table() -> dict[str, tuple[str, str]]:
    table: dict[str, tuple[str, str]] = {}
    entries = dict(_IRREGULAR_VERBS)
    entries.update({lemma: _regular_forms(lemma) for lemma in _REGULAR_VERBS})
    for lemma, (third, past, participle, gerund) in entries.items():
        table.setdefault(lemma, ("VB", lemma))
        table.setdefault(third, ("VBZ", lemma))
        table.setdefault(past, ("VBD", lemma))
        table.setdefault(participle, ("VBN", lemma))
        table.setdefault(gerund, ("VBG", lemma))
    return table


VERB_FORMS = _build_verb_table()

_IRREGULAR_NOUNS = {"children": "child", "men": "man", "women": "woman",
                    "feet": "foot", "teeth": "tooth", "mice": "mouse"}
NOUNS = {
    "dog", "cat", "ball", "book", "syntax", "professor", "student", "baby",
    "mommy", "daddy", "bird", "birdie", "cookie", "juice", "milk", "water",
    "truck", "car", "house", "door", "bed", "chair", "table", "shoe", "sock",
    "hat", "coat", "school", "park", "store", "toy", "block", "puzzle",
    "story", "song", "name", "boy", "girl", "man", "woman", "child",
    "teacher", "doctor", "bunny", "bear", "duck", "horse", "cow", "pig",
    "apple", "banana", "cracker", "spoon", "cup", "plate", "box", "bag",
    "picture", "crayon", "paper", "day", "time", "night", "morning", "lunch",
    "dinner", "breakfast", "word", "prize", "mat", "garden", "kitchen",
    "room", "floor", "hand", "head", "nose", "eye", "ear", "mouth", "foot",
    "hair", "tummy", "friend", "game", "tower", "train", "boat", "plane",
    "flower", "tree", "rain", "snow", "sun", "moon", "star", "frog", "fish",
    "mouse", "tooth", "thing", "place", "way", "home", "play", "call",
    "walk", "drink",
}
ADJS = {
    "big", "little", "small", "red", "blue", "green", "yellow", "good",
    "bad", "nice", "happy", "sad", "hot", "cold", "wet", "dry", "new",
    "old", "funny", "silly", "pretty", "dirty", "clean", "hungry",
    "thirsty", "tired", "sleepy", "loud", "quiet", "soft", "hard",
    "sweet", "favorite", "tall", "fast", "slow", "warm", "memorable",
}
CD = {"one", "two", "three", "four", "five", "six", "seven", "eight",
      "nine", "ten"}


def noun_lemma(word: str) -> str | None:
    """Lemma when the word is a known noun (singular or plural), else None."""
    if word in NOUNS:
        return word
    if word in _IRREGULAR_NOUNS:
        return _IRREGULAR_NOUNS[word]
    if word.endswith("ies") and word[:-3] + "y" in NOUNS:
        return word[:-3] + "y"
    if word.endswith("es") and word[:-2] in NOUNS:
        return word[:-2]
    if word.endswith("s") and word[:-1] in NOUNS:
        return word[:-1]
    return None


def is_plural_noun(word: str) -> bool:
    return (word in _IRREGULAR_NOUNS
            or (word.endswith("s") and noun_lemma(word) not in (None, word)))
