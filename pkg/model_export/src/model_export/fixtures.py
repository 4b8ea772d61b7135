"""Default sentence fixtures for parity verification."""

PARITY_SENTENCES = [
    "The committee approved the budget after a short debate.",
    "Heavy rain flooded several streets in the old town overnight.",
    "She finished the marathon in just under four hours.",
    "Engineers traced the outage to a faulty transformer.",
    "The museum reopened with a new exhibit on ancient trade routes.",
    "Local farmers expect a smaller harvest this season.",
    "The court postponed the hearing until next month.",
    "A small bakery on the corner won the regional prize.",
    "Researchers published their findings in an open archive.",
    "The airline added two daily flights to the coastal city.",
    "Volunteers planted three hundred trees along the river.",
    "The play received mixed reviews from early audiences.",
    "Negotiators reached a tentative agreement before midnight.",
    "The library extended its opening hours during exams.",
    "A sudden frost damaged the vineyards in the valley.",
    "The startup moved its headquarters closer to the port.",
    "Doctors recommended the new treatment for mild cases only.",
    "The bridge will close for repairs over the weekend.",
    "Historians disagree about the origin of the manuscript.",
    "The orchestra performed the entire symphony from memory.",
]
