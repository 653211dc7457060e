"""Published data used as fixtures.

Only operator words and integer label rows are stored; basis amplitudes are
always recomputed from the ordering and phase conventions.  Strings are kept as
printed (``Z²`` etc.) and parsed by :mod:`meanking.weylalg`.
"""

# first column of the two-qubit MUB table; generators are the first two words
TWO_QUBIT_SETS = [
    "Z1,1Z,ZZ",
    "X1,1X,XX",
    "Y1,1Y,YY",
    "XY,YZ,ZX",
    "YX,ZY,XZ",
]

# three-qubit table; 8 states need all three words as generators
THREE_QUBIT_SETS = [
    "Z11,1Z1,11Z",
    "X11,1X1,11X",
    "Y11,1Y1,11Y",
    "XYX,XZZ,YYZ",
    "XXZ,YXY,YZZ",
    "YXX,YZY,ZZX",
    "YYX,ZXX,ZYZ",
    "XYY,XZX,ZZY",
    "XXY,ZXZ,ZYY",
]

# two-qutrit table; only a generating pair is listed for each set
TWO_QUTRIT_SETS = [
    "Z1,1Z",
    "X1,1X",
    "Y1,1Y",
    "W1,1W",
    "XZ,ZW",
    "YZ,ZX",
    "XZ²,Z²Y",
    "YZ²,Z²W",
    "WZ,ZY",
    "WZ²,Z²X",
]

# (local prime, words per set, generators per set)
BUILTIN = {
    4: (2, TWO_QUBIT_SETS, 2),
    8: (2, THREE_QUBIT_SETS, 3),
    9: (3, TWO_QUTRIT_SETS, 2),
}

# GF(4) tables on element names 0, 1, a, a+1 (codes 0..3)
GF4_ADD = [
    [0, 1, 2, 3],
    [1, 0, 3, 2],
    [2, 3, 0, 1],
    [3, 2, 1, 0],
]
GF4_MUL = [
    [0, 0, 0, 0],
    [0, 1, 2, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
]

PRINTED_LABELS_4 = """
11432 12341 13214 14123
21324 22413 23142 24231
31243 32134 33421 34312
41111 42222 43333 44444
""".split()

# verbatim, including any typesetting defects in the source
PRINTED_LABELS_8 = """
118325476 123816745 132187654 145678123 154761832 167452381 176543218 181234567
213572064 228641357 231758246 246827531 257136428 264285713 275314682 282463175
312746583 321475638 338564721 347213856 356382147 365831274 374128365 383657412
415267348 426154873 437845162 448732615 451623784 462518437 473481526 484376251
514853627 527368514 536271485 541586372 558417263 563724158 572635841 585142736
617684235 624537186 635426817 642351768 653248671 668173542 671862453 686715324
716438752 725783461 734612578 743165287 752874316 761347825 778256134 787521643
811111111 822222222 833333333 844444444 855555555 866666666 877777777 888888888
""".split()

PRINTED_LABELS_9 = """
1129453786 1291534867 1345678912 1453786129 1534867291 1678912345 1786129453
1867291534 1912345678 2192768435 2219876543 2354921687 2435192768 2543219876
2687354921 2768435192 2876543219 2921687354 3147825369 3258693471 3369147825
3471258693 3582936714 3693471258 3714582936 3825369147 3936714582 4156237948
4237948156 4372489561 4489561372 4561372489 4615723894 4723894615 4894615723
4948156237 5138579624 5246381795 5381795246 5462813957 5579624138 5624138579
5795246381 5813957462 5957462813 6174396852 6285417639 6396852174 6417639285
6528741963 6639285417 6741963528 6852174396 6963528741 7183642507 7264759318
7318264759 7426975831 7597183642 7642597183 7759318264 7831426975 7975831426
8165984273 8273165984 8327516498 8498327516 8516498327 8651849732 8732651849
8849732651 8984273165 9111111111 9222222222 9333333333 9444444444 9555555555
9666666666 9777777777 9888888888 9999999999
""".split()

PRINTED_LABELS = {4: PRINTED_LABELS_4, 8: PRINTED_LABELS_8, 9: PRINTED_LABELS_9}
