"""The 31 industry groups used for sector multipliers and sector loss tables.

Groups follow NACE sections, except manufacturing (C) and transport (H), which
are split into division ranges.
"""

from __future__ import annotations

from naturisk.errors import UnmappedSector

# (code, first division, last division, description)
SECTOR_GROUPS: tuple[tuple[str, int, int, str], ...] = (
    ("A01-03", 1, 3, "Crop, animal production, hunting and related services"),
    ("B05-B09", 5, 9, "Mining and quarrying"),
    ("C10-C12", 10, 12, "Manufacture of food products, beverages and tobacco"),
    ("C13-C18", 13, 18, "Manufacture of textiles, wearing apparel, leather, paper and related products"),
    ("C19", 19, 19, "Manufacture of coke and refined petroleum products"),
    ("C20", 20, 20, "Manufacture of chemicals and chemical products"),
    ("C21-C22", 21, 22, "Manufacture of pharmaceutical products and preparations, rubber and plastic products"),
    ("C23", 23, 23, "Manufacture of other non-metallic mineral products"),
    ("C24-C25", 24, 25, "Manufacture of basic and fabricated metal products, except machinery and equipment"),
    ("C26-C28", 26, 28, "Manufacture of computer, electronic, optical, electrical equipment and machinery"),
    ("C29-C30", 29, 30, "Manufacture of motor vehicles, trailers and semi-trailers and other transport equipment"),
    ("C31-33", 31, 33, "Manufacture of furniture, repair and installation of machinery and other manufacturing"),
    ("D35", 35, 35, "Electricity, gas, steam and air conditioning supply"),
    ("E36-E39", 36, 39, "Water supply; sewerage; waste management and remediation activities"),
    ("F41-F43", 41, 43, "Construction"),
    ("G45-G47", 45, 47, "Wholesale and retail trade; repair of motor vehicles and motorcycles"),
    ("H49", 49, 49, "Land transport and transport via pipelines"),
    ("H50", 50, 50, "Water transport"),
    ("H51", 51, 51, "Air transport"),
    ("H52-H53", 52, 53, "Warehousing and support activities for transportation; postal and courier activities"),
    ("I55-I56", 55, 56, "Accommodation and food service activities"),
    ("J58-J63", 58, 63, "Information and communication"),
    ("K64-K66", 64, 66, "Financial and insurance activities"),
    ("L68", 68, 68, "Real estate activities"),
    ("M69-M75", 69, 75, "Professional, scientific and technical activities"),
    ("N77-N82", 77, 82, "Administrative and support service activities"),
    ("O84", 84, 84, "Public administration and defence; compulsory social security"),
    ("P85", 85, 85, "Education"),
    ("Q86-Q88", 86, 88, "Human health and social work activities"),
    ("R90-R93", 90, 93, "Arts, entertainment and recreation"),
    ("S94-S96", 94, 96, "Other service activities"),
)

SECTOR_CODES = tuple(code for code, *_ in SECTOR_GROUPS)
SECTOR_DESCRIPTIONS = {code: desc for code, _, _, desc in SECTOR_GROUPS}
SECTOR_ORDER = {code: i for i, code in enumerate(SECTOR_CODES)}

_BY_DIVISION = {div: code for code, lo, hi, _ in SECTOR_GROUPS for div in range(lo, hi + 1)}


def sector_group(nace4: str) -> str:
    """Industry group of a 4-digit NACE code such as ``"23.51"``."""
    try:
        division = int(nace4[:2])
    except ValueError:
        raise UnmappedSector(nace4) from None
    try:
        return _BY_DIVISION[division]
    except KeyError:
        raise UnmappedSector(nace4) from None
