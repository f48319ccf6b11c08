"""Regenerate the desk-scale fixture knowledge graph.

Emits fixtures/desk/{ontology.ttl,ontology.nt,instances.nt,manifest.json}
and fixtures/fig1/instances.nt. Deterministic: the same script always
produces byte-identical files, and the manifest counts are computed here,
independently of the package's parser.

Run from the repository root:  python tools/gen_fixture.py
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from ontoscout.rdfio import serialize_ntriples
from ontoscout.terms import Iri, Literal, Triple, RDF_TYPE, RDFS_LABEL, RDFS_SUBCLASSOF, XSD

ONTO = "http://example.org/onto/"
KG = "http://example.org/kg/"
OWL_CLASS = "http://www.w3.org/2002/07/owl#Class"
OWL_OBJECT = "http://www.w3.org/2002/07/owl#ObjectProperty"
OWL_DATATYPE = "http://www.w3.org/2002/07/owl#DatatypeProperty"
RDFS_DOMAIN = "http://www.w3.org/2000/01/rdf-schema#domain"
RDFS_RANGE = "http://www.w3.org/2000/01/rdf-schema#range"

SEED = 20250419

# (local name, label, parent local names)
CLASSES = [
    ("Person", "Person", []),
    ("Athlete", "Athlete", ["Person"]),
    ("FootballPlayer", "Football Player", ["Athlete"]),
    ("Swimmer", "Swimmer", ["Athlete"]),
    ("Coach", "Coach", ["Person"]),
    ("Politician", "Politician", ["Person"]),
    ("Artist", "Artist", ["Person"]),
    ("MusicalArtist", "Musical Artist", ["Artist"]),
    ("Actor", "Actor", ["Artist"]),
    ("Writer", "Writer", ["Person"]),
    ("Presenter", "Presenter", ["Person"]),
    ("Patient", "Patient", ["Person"]),
    ("Caregiver", "Caregiver", ["Person"]),
    ("Physician", "Physician", ["Person"]),
    ("Work", "Work", []),
    ("Book", "Book", ["Work"]),
    ("MusicalWork", "Musical Work", ["Work"]),
    ("Album", "Album", ["MusicalWork"]),
    ("Song", "Song", ["MusicalWork"]),
    ("Film", "Film", ["Work"]),
    ("TelevisionShow", "Television Show", ["Work"]),
    ("Artwork", "Artwork", ["Work"]),
    ("Place", "Place", []),
    ("City", "City", ["Place"]),
    ("Region", "Region", ["Place"]),
    ("Country", "Country", ["Place"]),
    ("Village", "Village", ["Place"]),
    ("Stadium", "Stadium", ["Place"]),
    ("Organisation", "Organisation", []),
    ("Club", "Club", ["Organisation"]),
    ("SportsTeam", "Sports Team", ["Organisation"]),
    ("BroadcastNetwork", "Broadcast Network", ["Organisation"]),
    ("TelevisionStation", "Television Station", ["Organisation", "BroadcastNetwork"]),
    ("RadioStation", "Radio Station", ["Organisation"]),
    ("Company", "Company", ["Organisation"]),
    ("University", "University", ["Organisation"]),
    ("Hospital", "Hospital", ["Organisation"]),
    ("SportsLeague", "Sports League", ["Organisation"]),
    ("Vehicle", "Vehicle", []),
    ("Ship", "Ship", ["Vehicle"]),
    ("Aircraft", "Aircraft", ["Vehicle"]),
    ("Event", "Event", []),
    ("SportsEvent", "Sports Event", ["Event"]),
    ("OlympicEvent", "Olympic Event", ["SportsEvent"]),
    ("Disease", "Disease", []),
    ("Diagnosis", "Diagnosis", []),
    ("Treatment", "Treatment", []),
    ("Award", "Award", []),
    ("EthnicGroup", "Ethnic Group", []),
    ("Sport", "Sport", []),
]

# (local, label, kind, domain local, range local or xsd name, triple count)
PROPERTIES = [
    ("author", "author", "object", "Person", "Work", 90),
    ("birthPlace", "birth place", "object", "Person", "Place", 120),
    ("previous", "previous", "object", "Work", "Work", 40),
    ("team", "team", "object", "Athlete", "Club", 60),
    ("memberOf", "member of", "object", "Person", "Organisation", 80),
    ("trainer", "trainer", "object", "Athlete", "Coach", 30),
    ("presents", "presents", "object", "Person", "TelevisionShow", 25),
    ("educatedAt", "educated at", "object", "Person", "University", 60),
    ("broadcastBy", "broadcast by", "object", "TelevisionShow", "BroadcastNetwork", 30),
    ("broadcastArea", "broadcast area", "object", "BroadcastNetwork", "Region", 25),
    ("homePort", "home port", "object", "Ship", "Place", 20),
    ("locatedIn", "located in", "object", "Place", "Region", 70),
    ("hasDisease", "has sickness", "object", "Patient", "Disease", 35),
    ("hasEthnicity", "has ethnicity", "object", "Person", "EthnicGroup", 50),
    ("treatedBy", "treated by", "object", "Patient", "Physician", 25),
    ("caregiver", "caregiver", "object", "Patient", "Caregiver", 20),
    ("wonAward", "won award", "object", "Person", "Award", 40),
    ("playsSport", "plays sport", "object", "Athlete", "Sport", 45),
    ("capital", "capital", "object", "Country", "City", 6),
    ("builder", "builder", "object", "Ship", "Company", 15),
    ("relatedTo", "related to", "object", None, None, 30),
    ("birthDate", "birth date", "datatype", "Person", "date", 100),
    ("name", "name", "datatype", None, "string", 80),
    ("launchDate", "launch date", "datatype", "Ship", "date", 8),
    ("population", "population", "datatype", "Place", "integer", 40),
    ("length", "length", "datatype", "Ship", "decimal", 8),
    ("publicationDate", "publication date", "datatype", "Work", "date", 50),
    ("onsetAge", "onset age", "datatype", "Patient", "integer", 20),
    ("title", "title", "datatype", "Work", "string", 45),
    ("numberOfEpisodes", "number of episodes", "datatype", "TelevisionShow", "integer", 10),
]

# exact-type instance counts per class
INSTANCE_COUNTS = {
    "Person": 12, "Athlete": 8, "FootballPlayer": 6, "Swimmer": 4, "Coach": 5,
    "Politician": 4, "Artist": 3, "MusicalArtist": 5, "Actor": 4, "Writer": 5,
    "Presenter": 4, "Patient": 8, "Caregiver": 4, "Physician": 4,
    "Work": 8, "Book": 10, "MusicalWork": 4, "Album": 6, "Song": 8, "Film": 8,
    "TelevisionShow": 8, "Artwork": 4,
    "Place": 4, "City": 10, "Region": 8, "Country": 6, "Village": 4, "Stadium": 4,
    "Organisation": 4, "Club": 8, "SportsTeam": 6, "BroadcastNetwork": 5,
    "TelevisionStation": 4, "RadioStation": 3, "Company": 6, "University": 5,
    "Hospital": 4, "SportsLeague": 3,
    "Vehicle": 2, "Ship": 8, "Aircraft": 4,
    "Event": 2, "SportsEvent": 5, "OlympicEvent": 4,
    "Disease": 8, "Diagnosis": 5, "Treatment": 5,
    "Award": 5, "EthnicGroup": 6, "Sport": 8,
}

WORDS = [
    "silver", "river", "northern", "echo", "harbor", "crown", "granite",
    "meadow", "signal", "willow", "ember", "summit", "latern", "cobalt",
    "aurora", "falcon", "cedar", "marble", "voyage", "horizon",
]


def c(local: str) -> Iri:
    return Iri(ONTO + local)


def p(local: str) -> Iri:
    return Iri(ONTO + local)


def kg(local: str) -> Iri:
    return Iri(KG + local)


def xsd(name: str) -> Iri:
    return Iri(XSD + name)


def build_ontology_triples() -> list[Triple]:
    triples: list[Triple] = []
    for local, label, parents in CLASSES:
        triples.append(Triple(c(local), Iri(RDF_TYPE), Iri(OWL_CLASS)))
        triples.append(Triple(c(local), Iri(RDFS_LABEL), Literal(label)))
        for parent in parents:
            triples.append(Triple(c(local), Iri(RDFS_SUBCLASSOF), c(parent)))
    for local, label, kind, domain, range_name, _count in PROPERTIES:
        decl = OWL_OBJECT if kind == "object" else OWL_DATATYPE
        triples.append(Triple(p(local), Iri(RDF_TYPE), Iri(decl)))
        triples.append(Triple(p(local), Iri(RDFS_LABEL), Literal(label)))
        if domain:
            triples.append(Triple(p(local), Iri(RDFS_DOMAIN), c(domain)))
        if range_name:
            target = xsd(range_name) if kind == "datatype" else c(range_name)
            triples.append(Triple(p(local), Iri(RDFS_RANGE), target))
    return triples


def ontology_turtle() -> str:
    lines = [
        "@prefix o: <http://example.org/onto/> .",
        "@prefix owl: <http://www.w3.org/2002/07/owl#> .",
        "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .",
        "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .",
        "",
    ]
    for local, label, parents in CLASSES:
        parts = [f"o:{local} a owl:Class"]
        if parents:
            refs = ", ".join(f"o:{parent}" for parent in parents)
            parts.append(f"rdfs:subClassOf {refs}")
        parts.append(f'rdfs:label "{label}"')
        lines.append(" ;\n    ".join(parts) + " .")
    lines.append("")
    for local, label, kind, domain, range_name, _count in PROPERTIES:
        decl = "owl:ObjectProperty" if kind == "object" else "owl:DatatypeProperty"
        parts = [f"o:{local} a {decl}"]
        if domain:
            parts.append(f"rdfs:domain o:{domain}")
        if range_name:
            ref = f"xsd:{range_name}" if kind == "datatype" else f"o:{range_name}"
            parts.append(f"rdfs:range {ref}")
        parts.append(f'rdfs:label "{label}"')
        lines.append(" ;\n    ".join(parts) + " .")
    lines.append("")
    return "\n".join(lines)


def descendants_or_self(target: str) -> set[str]:
    children: dict[str, set[str]] = {}
    for local, _label, parents in CLASSES:
        for parent in parents:
            children.setdefault(parent, set()).add(local)
    out = {target}
    stack = [target]
    while stack:
        for child in children.get(stack.pop(), ()):
            if child not in out:
                out.add(child)
                stack.append(child)
    return out


def build_instances() -> tuple[list[Triple], dict]:
    rng = random.Random(SEED)
    triples: list[Triple] = []
    by_class: dict[str, list[Iri]] = {}
    all_entities: list[Iri] = []

    for local, _label, _parents in CLASSES:
        count = INSTANCE_COUNTS[local]
        entities = []
        for i in range(1, count + 1):
            iri = kg(f"{local[0].lower()}{local[1:]}{i}")
            entities.append(iri)
            triples.append(Triple(iri, Iri(RDF_TYPE), c(local)))
            label = f"{_label_for(local)} {i}"
            triples.append(Triple(iri, Iri(RDFS_LABEL), Literal(label)))
        by_class[local] = entities
        all_entities.extend(entities)

    def pool(class_local: str | None) -> list[Iri]:
        if class_local is None:
            return all_entities
        out: list[Iri] = []
        for member in sorted(descendants_or_self(class_local)):
            out.extend(by_class[member])
        return out

    def literal_for(range_name: str) -> Literal:
        if range_name == "date":
            year = rng.randint(1940, 2005)
            month = rng.randint(1, 12)
            day = rng.randint(1, 28)
            return Literal(f"{year:04d}-{month:02d}-{day:02d}", xsd("date"))
        if range_name == "integer":
            return Literal(str(rng.randint(1, 5_000_000)), xsd("integer"))
        if range_name == "decimal":
            return Literal(f"{rng.randint(40, 400)}.{rng.randint(0, 99):02d}", xsd("decimal"))
        return Literal(" ".join(rng.choice(WORDS) for _ in range(2)).title())

    # Hand-placed seed rows guaranteeing the canonical exploration flow in
    # both typing modes: one chain over exact Person/Work/Place instances
    # (matches even without subclass closure), one over subclass-typed
    # entities, plus one broadcast chain and one medical chain.
    hand = [
        Triple(kg("person1"), p("author"), kg("work1")),
        Triple(kg("person1"), p("birthPlace"), kg("place1")),
        Triple(kg("work1"), p("previous"), kg("work2")),
        Triple(kg("person1"), p("birthDate"), Literal("1992-03-04", xsd("date"))),
        Triple(kg("writer1"), p("author"), kg("book1")),
        Triple(kg("writer1"), p("birthPlace"), kg("city1")),
        Triple(kg("book1"), p("previous"), kg("book2")),
        Triple(kg("writer1"), p("birthDate"), Literal("1990-05-01", xsd("date"))),
        Triple(kg("presenter1"), p("presents"), kg("televisionShow1")),
        Triple(kg("televisionShow1"), p("broadcastBy"), kg("broadcastNetwork1")),
        Triple(kg("broadcastNetwork1"), p("broadcastArea"), kg("region1")),
        Triple(kg("patient1"), p("hasDisease"), kg("disease1")),
        Triple(kg("patient1"), p("hasEthnicity"), kg("ethnicGroup1")),
        Triple(kg("athlete1"), p("trainer"), kg("coach1")),
        Triple(kg("athlete1"), p("team"), kg("club1")),
    ]
    hand_by_prop: dict[str, int] = {}
    for t in hand:
        local = t.predicate.value[len(ONTO):]
        hand_by_prop[local] = hand_by_prop.get(local, 0) + 1
    triples.extend(hand)

    seen: set[tuple[str, str, str]] = {
        (t.subject.value, t.predicate.value, str(t.object)) for t in hand
    }
    prevalence: dict[str, int] = dict(hand_by_prop)
    for local, _label, kind, domain, range_name, count in PROPERTIES:
        subjects = pool(domain)
        remaining = count - hand_by_prop.get(local, 0)
        produced = 0
        guard = 0
        while produced < remaining and guard < remaining * 50:
            guard += 1
            subject = rng.choice(subjects)
            if kind == "object":
                target_pool = pool(range_name)
                obj: Iri | Literal = rng.choice(target_pool)
                if obj == subject:
                    continue
            else:
                obj = literal_for(range_name or "string")
            key = (subject.value, p(local).value, str(obj))
            if key in seen:
                continue
            seen.add(key)
            triples.append(Triple(subject, p(local), obj))
            produced += 1
        prevalence[local] = prevalence.get(local, 0) + produced

    manifest = {
        "classes": len(CLASSES),
        "properties": len(PROPERTIES),
        "classInstances": {ONTO + local: INSTANCE_COUNTS[local] for local, _l, _p in CLASSES},
        "prevalence": {ONTO + local: count for local, count in sorted(prevalence.items())},
        "instanceTriples": len(triples),
        "typeTriples": sum(INSTANCE_COUNTS.values()),
        "labelTriples": sum(INSTANCE_COUNTS.values()),
    }
    return triples, manifest


def _label_for(local: str) -> str:
    for name, label, _parents in CLASSES:
        if name == local:
            return label
    raise KeyError(local)


def fig1_triples() -> list[Triple]:
    return [
        Triple(kg("alice"), Iri(RDF_TYPE), c("Person")),
        Triple(kg("bob"), Iri(RDF_TYPE), c("Person")),
        Triple(kg("book1"), Iri(RDF_TYPE), c("Work")),
        Triple(kg("book2"), Iri(RDF_TYPE), c("Work")),
        Triple(kg("paris"), Iri(RDF_TYPE), c("Place")),
        Triple(kg("alice"), p("author"), kg("book2")),
        Triple(kg("alice"), p("birthPlace"), kg("paris")),
        Triple(kg("book2"), p("previous"), kg("book1")),
        Triple(kg("alice"), p("birthDate"), Literal("1990-05-01", xsd("date"))),
        Triple(kg("bob"), p("birthDate"), Literal("1975-03-10", xsd("date"))),
    ]


def main() -> None:
    root = Path(__file__).resolve().parent.parent
    desk = root / "fixtures" / "desk"
    fig1 = root / "fixtures" / "fig1"
    desk.mkdir(parents=True, exist_ok=True)
    fig1.mkdir(parents=True, exist_ok=True)

    onto_triples = build_ontology_triples()
    (desk / "ontology.nt").write_text(serialize_ntriples(onto_triples), encoding="utf-8")
    (desk / "ontology.ttl").write_text(ontology_turtle(), encoding="utf-8")

    instance_triples, manifest = build_instances()
    (desk / "instances.nt").write_text(serialize_ntriples(instance_triples), encoding="utf-8")

    manifest["ontologyTriples"] = len(onto_triples)
    (desk / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    (fig1 / "instances.nt").write_text(serialize_ntriples(fig1_triples()), encoding="utf-8")
    print(
        f"wrote {len(onto_triples)} ontology triples, "
        f"{len(instance_triples)} instance triples"
    )


if __name__ == "__main__":
    main()
