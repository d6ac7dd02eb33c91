#!/usr/bin/env python3
"""Regenerates tests/fixtures/film/ (the film corpus used by the tests).

Run from the repository root:  python3 tests/fixtures/make_fixture.py

Each sentence is a list of phrases. A phrase is (words, head_phrase, deprel,
label): its last word heads the phrase, the other words attach to it as
`compound`, and the phrase head attaches to the head of `head_phrase`
(None for the root). A non-empty label marks the phrase as an entity.
"""

import hashlib
import json
import os

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "film")
DIM = 64
WINDOW, STRIDE = 3, 2

FILMS = [
    # title, year, director, producer, [(actor, character)], [(wife actor, husband actor)]
    ("Here Comes the Boom", 2012, "Frank Coraci", "Kevin James",
     [("Kevin James", "Scott Voss"), ("Salma Hayek", "Bella Flores"), ("Henry Winkler", "Marty Streb")], []),
    ("Grown Ups", 2010, "Dennis Dugan", "Adam Sandler",
     [("Adam Sandler", "Lenny Feder"), ("Kevin James", "Eric Lamonsoff"), ("Chris Rock", "Kurt McKenzie")],
     [("Maria Bello", "Kevin James"), ("Salma Hayek", "Adam Sandler")]),
    ("Grown Ups 2", 2013, "Dennis Dugan", "Adam Sandler",
     [("Adam Sandler", "Lenny Feder"), ("Kevin James", "Eric Lamonsoff"), ("David Spade", "Marcus Higgins")], []),
    ("Zookeeper", 2011, "Frank Coraci", "Todd Garner",
     [("Kevin James", "Griffin Keyes"), ("Rosario Dawson", "Kate Moore")], []),
    ("Paul Blart Mall Cop", 2009, "Steve Carr", "Kevin James",
     [("Kevin James", "Paul Blart"), ("Keir O'Donnell", "Veck Sims")], []),
    ("Paul Blart Mall Cop 2", 2015, "Andy Fickman", "Kevin James",
     [("Kevin James", "Paul Blart"), ("Raini Rodriguez", "Maya Blart")], []),
    ("Hitch", 2005, "Andy Tennant", "Will Smith",
     [("Will Smith", "Alex Hitchens"), ("Kevin James", "Albert Brennaman"), ("Eva Mendes", "Sara Melas")], []),
    ("Pixels", 2015, "Chris Columbus", "Adam Sandler",
     [("Adam Sandler", "Sam Brenner"), ("Kevin James", "William Cooper"), ("Josh Gad", "Ludlow Lamonsoff")], []),
    ("I Now Pronounce You Chuck and Larry", 2007, "Dennis Dugan", "Adam Sandler",
     [("Adam Sandler", "Chuck Levine"), ("Kevin James", "Larry Valentine"), ("Jessica Biel", "Alex McDonough")], []),
    ("Click", 2006, "Frank Coraci", "Adam Sandler",
     [("Adam Sandler", "Michael Newman"), ("Kate Beckinsale", "Donna Newman"), ("Christopher Walken", "Morty")],
     [("Kate Beckinsale", "Adam Sandler")]),
    ("The Waterboy", 1998, "Frank Coraci", "Robert Simonds",
     [("Adam Sandler", "Bobby Boucher"), ("Kathy Bates", "Helen Boucher"), ("Henry Winkler", "Klein")], []),
    ("The Wedding Singer", 1998, "Frank Coraci", "Robert Simonds",
     [("Adam Sandler", "Robbie Hart"), ("Drew Barrymore", "Julia Sullivan")], []),
    ("Blended", 2014, "Frank Coraci", "Adam Sandler",
     [("Adam Sandler", "Jim Friedman"), ("Drew Barrymore", "Lauren Reynolds")], []),
    ("Big Daddy", 1999, "Dennis Dugan", "Sid Ganis",
     [("Adam Sandler", "Sonny Koufax"), ("Joey Lauren Adams", "Layla Maloney")], []),
    ("Happy Gilmore", 1996, "Dennis Dugan", "Robert Simonds",
     [("Adam Sandler", "Happy Gilmore"), ("Christopher McDonald", "Shooter McGavin")], []),
    ("Just Go with It", 2011, "Dennis Dugan", "Adam Sandler",
     [("Adam Sandler", "Danny Maccabee"), ("Jennifer Aniston", "Katherine Murphy")], []),
    ("Jack and Jill", 2011, "Dennis Dugan", "Adam Sandler",
     [("Adam Sandler", "Jack Sadelstein"), ("Katie Holmes", "Erin Sadelstein")],
     [("Katie Holmes", "Adam Sandler")]),
    ("Mr Deeds", 2002, "Steven Brill", "Sid Ganis",
     [("Adam Sandler", "Longfellow Deeds"), ("Winona Ryder", "Babe Bennett")], []),
    ("Fifty First Dates", 2004, "Peter Segal", "Jack Giarraputo",
     [("Adam Sandler", "Henry Roth"), ("Drew Barrymore", "Lucy Whitmore")], []),
    ("Anger Management", 2003, "Peter Segal", "Jack Giarraputo",
     [("Adam Sandler", "Dave Buznik"), ("Jack Nicholson", "Buddy Rydell")], []),
    ("Bedtime Stories", 2008, "Adam Shankman", "Andrew Gunn",
     [("Adam Sandler", "Skeeter Bronson"), ("Keri Russell", "Jill Hastings")], []),
    ("Hotel Transylvania", 2012, "Genndy Tartakovsky", "Michelle Murdocca",
     [("Adam Sandler", "Dracula"), ("Kevin James", "Frankenstein"), ("Selena Gomez", "Mavis")],
     [("Fran Drescher", "Kevin James")]),
    ("Hotel Transylvania 2", 2015, "Genndy Tartakovsky", "Michelle Murdocca",
     [("Adam Sandler", "Dracula"), ("Kevin James", "Frankenstein"), ("Andy Samberg", "Jonathan")], []),
    ("True Memoirs of an International Assassin", 2016, "Jeff Wadlow", "Kevin James",
     [("Kevin James", "Sam Larson"), ("Zulay Henao", "Rosa Garcia")], []),
    ("Sandy Wexler", 2017, "Steven Brill", "Adam Sandler",
     [("Adam Sandler", "Sandy Wexler"), ("Jennifer Hudson", "Courtney Clarke"), ("Kevin James", "Ted Rafferty")], []),
    ("Becky", 2020, "Jonathan Milott", "Jordan Yale Levine",
     [("Kevin James", "Dominick"), ("Lulu Wilson", "Becky Hooper")], []),
    ("Home Team", 2022, "Charles Kinnane", "Adam Sandler",
     [("Kevin James", "Sean Payton"), ("Taylor Lautner", "Troy Lambert")], []),
    ("The Dilemma", 2011, "Ron Howard", "Brian Grazer",
     [("Vince Vaughn", "Ronny Valentine"), ("Kevin James", "Nick Brannen"), ("Winona Ryder", "Geneva Brannen")],
     [("Winona Ryder", "Kevin James")]),
    ("Monster Trucks", 2016, "Chris Wedge", "Mary Parent",
     [("Lucas Till", "Tripp Coley"), ("Jane Levy", "Meredith")], []),
    ("Little Nicky", 2000, "Steven Brill", "Robert Simonds",
     [("Adam Sandler", "Nicky"), ("Patricia Arquette", "Valerie Veran")], []),
]

PERSON, WORK, YEAR = "PERSON", "WORK_OF_ART", "DATE"


def s_intro(title, year, director):
    return [
        (title.split(), 5, "nsubj", WORK),
        (["is"], 5, "cop", ""),
        (["a"], 5, "det", ""),
        ([str(year)], 5, "amod", YEAR),
        (["comedy"], 5, "compound", ""),
        (["film"], None, "root", ""),
        (["directed"], 5, "acl", ""),
        (["by"], 8, "case", ""),
        (director.split(), 6, "obl", PERSON),
        (["."], 5, "punct", ""),
    ]


def s_producer(producer):
    return [
        (["The"], 1, "det", ""),
        (["film"], 3, "nsubj:pass", ""),
        (["was"], 3, "aux:pass", ""),
        (["produced"], None, "root", ""),
        (["by"], 5, "case", ""),
        (producer.split(), 3, "obl", PERSON),
        (["."], 3, "punct", ""),
    ]


def s_cast(actor, character, title):
    return [
        (actor.split(), 1, "nsubj", PERSON),
        (["stars"], None, "root", ""),
        (["as"], 3, "case", ""),
        (character.split(), 1, "obl", PERSON),
        (["in"], 5, "case", ""),
        (title.split(), 1, "obl", WORK),
        (["."], 1, "punct", ""),
    ]


def s_wife(wife, husband, title):
    return [
        (wife.split(), 1, "nsubj", PERSON),
        (["plays"], None, "root", ""),
        (["the"], 3, "det", ""),
        (["wife"], 1, "obj", ""),
        (["of"], 5, "case", ""),
        (husband.split(), 3, "nmod", PERSON),
        (["in"], 7, "case", ""),
        (title.split(), 1, "obl", WORK),
        (["."], 1, "punct", ""),
    ]


def s_collab(producer, director, title):
    return [
        (producer.split(), 3, "nsubj", PERSON),
        (["and"], 2, "cc", ""),
        (director.split(), 0, "conj", PERSON),
        (["worked"], None, "root", ""),
        (["together"], 3, "advmod", ""),
        (["on"], 6, "case", ""),
        (title.split(), 3, "obl", WORK),
        (["."], 3, "punct", ""),
    ]


def build(phrases):
    """Returns (tokens, entities); tokens are (id, form, head, deprel)."""
    heads_at = []
    next_id = 1
    for words, _, _, _ in phrases:
        heads_at.append(next_id + len(words) - 1)
        next_id += len(words)
    tokens, entities = [], []
    next_id = 1
    for words, head_phrase, deprel, label in phrases:
        start = next_id - 1
        for j, w in enumerate(words):
            tid = next_id + j
            if j < len(words) - 1:
                tokens.append((tid, w, next_id + len(words) - 1, "compound"))
            else:
                head = 0 if head_phrase is None else heads_at[head_phrase]
                tokens.append((tid, w, head, deprel))
        next_id += len(words)
        if label:
            entities.append((start, next_id - 1, " ".join(words), label))
    return tokens, entities


def sentence_text(tokens):
    text = " ".join(form for _, form, _, _ in tokens)
    return text.replace(" .", ".")


def embed(text):
    v = [0.0] * DIM
    word = ""
    for ch in text.lower() + " ":
        if ch.isalnum():
            word += ch
        elif word:
            h = hashlib.md5(word.encode("utf-8")).digest()
            v[h[0] % DIM] += 1.0 if h[1] % 2 == 0 else -1.0
            word = ""
    if all(x == 0.0 for x in v):
        v[0] = 1.0
    return v


def film_sentences(film):
    title, year, director, producer, cast, wives = film
    sents = [s_intro(title, year, director), s_producer(producer)]
    for actor, character in cast:
        sents.append(s_cast(actor, character, title))
    for wife, husband in wives:
        sents.append(s_wife(wife, husband, title))
    if producer != director:
        sents.append(s_collab(producer, director, title))
    return sents


def chunk_starts(n):
    starts, start = [], 0
    while start < n:
        starts.append(start)
        if min(start + WINDOW, n) == n:
            break
        start += STRIDE
    return starts


def dump_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


def main():
    os.makedirs(OUT, exist_ok=True)
    docs, ents, embs, conllu = [], [], [], []
    for d, film in enumerate(FILMS):
        doc_id = "film%02d" % d
        texts = []
        for s, phrases in enumerate(film_sentences(film)):
            tokens, spans = build(phrases)
            text = sentence_text(tokens)
            texts.append(text)
            conllu.append("# sent_id = %s#%d" % (doc_id, s))
            conllu.append("# text = " + text)
            for tid, form, head, rel in tokens:
                conllu.append("\t".join([str(tid), form, "_", "_", "_", "_", str(head), rel, "_", "_"]))
            conllu.append("")
            for start, end, surface, label in spans:
                ents.append({"doc_id": doc_id, "sent": s, "start": start, "end": end,
                             "surface": surface, "label": label})
        docs.append({"id": doc_id, "title": film[0], "text": " ".join(texts)})
        for start in chunk_starts(len(texts)):
            chunk_text = " ".join(texts[start:start + WINDOW])
            embs.append({"chunk_id": "%s/%d" % (doc_id, start), "vector": embed(chunk_text)})

    dump_jsonl(os.path.join(OUT, "documents.jsonl"), docs)
    dump_jsonl(os.path.join(OUT, "entities.jsonl"), ents)
    dump_jsonl(os.path.join(OUT, "embeddings.jsonl"), embs)
    with open(os.path.join(OUT, "trees.conllu"), "w", encoding="utf-8") as f:
        f.write("\n".join(conllu) + "\n")

    wife_question = "Who plays the wife of the producer of Here Comes the Boom in Grown Ups?"
    sub1 = "Who is the producer of Here Comes the Boom?"
    sub2 = "Who plays the wife of this producer in Grown Ups?"
    sub2r = "Who plays the wife of Kevin James in Grown Ups?"
    directed = "Who directed Here Comes the Boom?"
    bella = "Who stars as Bella Flores in Here Comes the Boom?"
    wrong1 = "Who is the director of Here Comes the Boom?"
    wrong2 = "Who plays the wife of this director in Grown Ups?"
    wrong2r = "Who plays the wife of Frank Coraci in Grown Ups?"
    produced = "Who produced Grown Ups?"

    dump_jsonl(os.path.join(OUT, "queries.jsonl"), [
        {"qid": "wife-step1", "text": sub1, "entities": ["Here Comes the Boom"], "vector": embed(sub1)},
        {"qid": "wife-step2", "text": sub2r, "entities": ["Kevin James", "Grown Ups"], "vector": embed(sub2r)},
        {"qid": "sandler-sandler", "text": "Which films did Adam Sandler make with Frank Coraci?",
         "entities": ["Adam Sandler", "Frank Coraci"],
         "vector": embed("Which films did Adam Sandler make with Frank Coraci?")},
        {"qid": "no-entities", "text": "Which comedy film was produced in 1998?", "entities": [],
         "vector": embed("Which comedy film was produced in 1998?")},
    ])

    entity_map = {
        sub1: ["Here Comes the Boom"], sub2r: ["Kevin James", "Grown Ups"],
        directed: ["Here Comes the Boom"], bella: ["Bella Flores", "Here Comes the Boom"],
        wrong1: ["Here Comes the Boom"], wrong2r: ["Frank Coraci", "Grown Ups"],
        produced: ["Grown Ups"],
    }

    def record(qid, question, answer, decomposition, effective):
        return {"qid": qid, "question": question, "answer": answer, "decomposition": decomposition,
                "q_entities": {str(i): entity_map[q] for i, q in enumerate(effective)},
                "q_vectors": {str(i): embed(q) for i, q in enumerate(effective)}}

    dump_jsonl(os.path.join(OUT, "questions.jsonl"), [
        record("q1", wife_question, "Maria Bello", [sub1, sub2], [sub1, sub2r]),
        record("q2", directed, "Frank Coraci", [directed], [directed]),
        record("q3", bella, "Salma Hayek", [bella], [bella]),
    ])
    dump_jsonl(os.path.join(OUT, "candidates.jsonl"), [
        record("c1", wife_question, "Maria Bello", [sub1, sub2], [sub1, sub2r]),
        record("c2", directed, "Frank Coraci", [directed], [directed]),
        record("c3", wife_question, "Maria Bello", [wrong1, wrong2], [wrong1, wrong2r]),
        record("c4", directed, "Frank Coraci", [produced], [produced]),
    ])
    dump_jsonl(os.path.join(OUT, "error_questions.jsonl"), [
        {"qid": "e1", "question": "Why is the sky made of cheese?", "answer": "It is not"},
        record("e2", directed, "Frank Coraci", [directed], [directed]),
    ])

    rules = [
        {"template": "decompose", "question": wife_question, "reply": json.dumps([sub1, sub2])},
        {"template": "decompose", "question": "Why is the sky made of cheese?", "reply": "I cannot answer that."},
        {"template": "answer", "question": sub1, "context_contains": "produced by Kevin James", "reply": "Kevin James"},
        {"template": "answer", "question": sub2r,
         "context_contains": "Maria Bello plays the wife of Kevin James in Grown Ups", "reply": "Maria Bello"},
        {"template": "answer", "question": directed, "context_contains": "directed by Frank Coraci",
         "reply": "Frank Coraci"},
        {"template": "answer", "question": wrong1, "context_contains": "directed by Frank Coraci",
         "reply": "Frank Coraci"},
        {"template": "answer", "question": bella, "context_contains": "Bella Flores", "reply": "Salma Flores"},
        {"template": "answer", "question": produced, "context_contains": "produced by Adam Sandler",
         "reply": "Adam Sandler"},
    ]
    for q, es in sorted(entity_map.items()):
        rules.append({"template": "extract_entities", "question": q, "reply": json.dumps(es)})
    script = {"unknown_reply": "unknown", "rules": rules,
              "embeddings": {q: embed(q) for q in sorted(entity_map)}}
    with open(os.path.join(OUT, "stub_script.json"), "w", encoding="utf-8") as f:
        json.dump(script, f, indent=2, ensure_ascii=False)
        f.write("\n")


if __name__ == "__main__":
    main()
