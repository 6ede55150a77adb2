"""Regenerate the bundled lexicons under crates/core/resources/.

Requires `wordfreq` and the ERRANT 3.0.2 wheel's en_GB-large.txt word list
(Hunspell / SCOWL, bundled with ERRANT under the MIT license). Output is
deterministic for fixed inputs.

    python3 tools/build_lexicons.py /path/to/en_GB-large.txt
"""
import sys
from pathlib import Path

from wordfreq import top_n_list

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "resources"

IRREGULAR = {
    "be": ["is", "am", "are", "was", "were", "been", "being"],
    "have": ["has", "had", "having"],
    "do": ["does", "did", "done", "doing"],
    "go": ["goes", "went", "gone", "going"],
    "get": ["gets", "got", "gotten", "getting"],
    "make": ["makes", "made", "making"],
    "take": ["takes", "took", "taken", "taking"],
    "come": ["comes", "came", "coming"],
    "see": ["sees", "saw", "seen", "seeing"],
    "know": ["knows", "knew", "known", "knowing"],
    "give": ["gives", "gave", "given", "giving"],
    "think": ["thinks", "thought", "thinking"],
    "tell": ["tells", "told", "telling"],
    "become": ["becomes", "became", "becoming"],
    "leave": ["leaves", "left", "leaving"],
    "feel": ["feels", "felt", "feeling"],
    "bring": ["brings", "brought", "bringing"],
    "begin": ["begins", "began", "begun", "beginning"],
    "keep": ["keeps", "kept", "keeping"],
    "hold": ["holds", "held", "holding"],
    "write": ["writes", "wrote", "written", "writing"],
    "stand": ["stands", "stood", "standing"],
    "hear": ["hears", "heard", "hearing"],
    "mean": ["means", "meant", "meaning"],
    "meet": ["meets", "met", "meeting"],
    "run": ["runs", "ran", "running"],
    "pay": ["pays", "paid", "paying"],
    "sit": ["sits", "sat", "sitting"],
    "speak": ["speaks", "spoke", "spoken", "speaking"],
    "read": ["reads", "reading"],
    "grow": ["grows", "grew", "grown", "growing"],
    "lose": ["loses", "lost", "losing"],
    "fall": ["falls", "fell", "fallen", "falling"],
    "send": ["sends", "sent", "sending"],
    "build": ["builds", "built", "building"],
    "understand": ["understands", "understood", "understanding"],
    "draw": ["draws", "drew", "drawn", "drawing"],
    "break": ["breaks", "broke", "broken", "breaking"],
    "spend": ["spends", "spent", "spending"],
    "cut": ["cuts", "cutting"],
    "rise": ["rises", "rose", "risen", "rising"],
    "drive": ["drives", "drove", "driven", "driving"],
    "buy": ["buys", "bought", "buying"],
    "wear": ["wears", "wore", "worn", "wearing"],
    "choose": ["chooses", "chose", "chosen", "choosing"],
    "seek": ["seeks", "sought", "seeking"],
    "throw": ["throws", "threw", "thrown", "throwing"],
    "catch": ["catches", "caught", "catching"],
    "deal": ["deals", "dealt", "dealing"],
    "win": ["wins", "won", "winning"],
    "forget": ["forgets", "forgot", "forgotten", "forgetting"],
    "sell": ["sells", "sold", "selling"],
    "eat": ["eats", "ate", "eaten", "eating"],
    "teach": ["teaches", "taught", "teaching"],
    "fly": ["flies", "flew", "flown", "flying"],
    "sing": ["sings", "sang", "sung", "singing"],
    "swim": ["swims", "swam", "swum", "swimming"],
    "drink": ["drinks", "drank", "drunk", "drinking"],
    "sleep": ["sleeps", "slept", "sleeping"],
    "fight": ["fights", "fought", "fighting"],
    "hide": ["hides", "hid", "hidden", "hiding"],
    "shake": ["shakes", "shook", "shaken", "shaking"],
    "steal": ["steals", "stole", "stolen", "stealing"],
    "put": ["puts", "putting"],
    "set": ["sets", "setting"],
    "let": ["lets", "letting"],
    "say": ["says", "said", "saying"],
    "find": ["finds", "finding"],
    "lend": ["lends", "lent", "lending"],
    "feed": ["feeds", "fed", "feeding"],
    "lead": ["leads", "led", "leading"],
    "shoot": ["shoots", "shot", "shooting"],
    "forgive": ["forgives", "forgave", "forgiven", "forgiving"],
    "ride": ["rides", "rode", "ridden", "riding"],
    "wake": ["wakes", "woke", "woken", "waking"],
}

REGULAR = """
abandon accept achieve add admit affect agree allow announce answer appear apply
appreciate approach argue arrange arrive ask associate assume attach attack attempt
attend avoid base behave believe belong borrow bother call cancel care carry cause
celebrate change charge check claim clean clear close collect combine comment compare
compete complain complete concentrate concern confirm connect consider consist contain
continue contribute control convince cook copy correct cost count cover create cross
cry damage dance decide declare decrease defend define delay deliver demand depend
describe deserve design destroy determine develop die disagree disappear discover
discuss divide doubt dress drop earn educate employ encourage end enjoy enter
establish examine exist expect experience explain explore express extend fail fill
finish fit fix focus follow force form found gather guess handle happen hate help
hope hurry identify ignore imagine improve include increase indicate influence inform
install intend introduce invent invest invite involve join judge jump kill kiss
knock last laugh learn like limit link list listen live look love maintain manage
mark marry matter measure mention mind miss move need notice obtain occur offer open
order organize own pass perform pick place plan play point prefer prepare present
prevent produce promise protect prove provide publish pull push raise reach realize
receive recognize recommend reduce refer reflect refuse regard relate relax release
remain remember remove repeat replace reply report represent require rest result
return reveal save score search seem separate serve settle share shop shout show
smile solve sound start state stay stop study succeed suffer suggest supply support
suppose surprise survive talk taste tend test thank touch train travel treat try
turn use visit wait walk want warn wash watch wish wonder work worry
""".split()

DOUBLE = {"admit", "fit", "cancel", "travel", "control", "drop", "plan", "prefer", "shop", "stop", "refer", "occur"}


def third(v):
    if v.endswith(("s", "x", "z", "ch", "sh", "o")):
        return v + "es"
    if v.endswith("y") and v[-2] not in "aeiou":
        return v[:-1] + "ies"
    return v + "s"


def past(v):
    if v in DOUBLE:
        return v + v[-1] + "ed"
    if v.endswith("e"):
        return v + "d"
    if v.endswith("y") and v[-2] not in "aeiou":
        return v[:-1] + "ied"
    return v + "ed"


def gerund(v):
    if v in DOUBLE:
        return v + v[-1] + "ing"
    if v.endswith("ie"):
        return v[:-2] + "ying"
    if v.endswith("e") and not v.endswith(("ee", "ye", "oe")):
        return v[:-1] + "ing"
    return v + "ing"


# Frequent words with well-attested learner misspellings or confusions.
CONFUSIONS = {
    "equipment": ["equipmet"],
    "therefore": ["therefofe", "therefor"],
    "their": ["there"],
    "there": ["their"],
    "then": ["than"],
    "than": ["then"],
    "affect": ["effect"],
    "effect": ["affect"],
    "lose": ["loose"],
    "quite": ["quiet"],
    "quiet": ["quite"],
    "accept": ["except"],
    "advice": ["advise"],
    "principal": ["principle"],
    "weather": ["whether"],
    "whether": ["weather", "wether"],
    "where": ["were", "wear"],
    "to": ["too"],
    "too": ["to"],
    "know": ["now"],
    "new": ["knew"],
    "of": ["off"],
    "off": ["of"],
    "form": ["from"],
    "from": ["form"],
    "though": ["thought"],
    "through": ["trough", "throught"],
    "thing": ["think"],
    "hole": ["whole"],
    "whole": ["hole"],
    "locale": ["louce", "local"],
    "because": ["becuase", "beacause"],
    "believe": ["beleive", "belive"],
    "receive": ["recieve"],
    "definitely": ["definately", "definitly"],
    "necessary": ["neccessary", "necesary"],
    "environment": ["enviroment", "environement"],
    "government": ["goverment"],
    "different": ["diffrent", "differnt"],
    "beginning": ["begining"],
    "interesting": ["intresting", "interresting"],
    "which": ["wich"],
    "until": ["untill"],
    "tomorrow": ["tommorow", "tomorow"],
    "separate": ["seperate"],
    "occasion": ["ocassion", "occassion"],
    "address": ["adress"],
    "business": ["buisness", "bussiness"],
    "friend": ["freind", "frend"],
    "people": ["peple", "poeple"],
    "really": ["realy"],
    "finally": ["finaly"],
    "especially": ["especialy"],
    "sentence": ["sentance"],
    "grammar": ["grammer"],
    "language": ["langauge", "languge"],
    "knowledge": ["knowlege"],
    "opportunity": ["oportunity", "opportunaty"],
    "experience": ["experiance"],
    "restaurant": ["restaraunt", "resturant"],
    "success": ["sucess"],
    "accommodation": ["accomodation"],
    "recommend": ["recomend", "reccommend"],
    "comfortable": ["confortable", "comfortible"],
    "information": ["infomation", "informaton"],
    "important": ["importent", "imporant"],
    "problem": ["probelm", "problam"],
    "company": ["compagny", "compny"],
    "country": ["contry", "countri"],
    "during": ["durring"],
    "family": ["famly", "familly"],
    "future": ["futur"],
    "holiday": ["holyday"],
    "journey": ["jorney"],
    "minute": ["minite"],
    "question": ["quesion", "questoin"],
    "teacher": ["teatcher"],
    "school": ["shool", "scool"],
    "study": ["studdy"],
    "tired": ["tierd"],
    "village": ["vilage"],
    "weekend": ["weekand"],
    "write": ["wirte", "rite"],
    "calendar": ["calender"],
    "regional": ["regionnal"],
    "visible": ["visable"],
    "potential": ["potencial"],
    "interests": ["intrests"],
    "events": ["evnets"],
    "clients": ["cleints"],
    "areas": ["aeras"],
}

INSERTIONS = """the a an to of in on at for with that about from very so some by as
""".split()
DELETIONS = """is are was were be been has have had will would can could it there and
do does did
""".split()


def main():
    spell_path = Path(sys.argv[1])
    spell = {w.strip() for w in spell_path.read_text().splitlines() if w.strip()}

    groups = []
    seen = {}
    for lemma, forms in IRREGULAR.items():
        groups.append((lemma, forms))
    for v in REGULAR:
        forms = []
        for f in (third(v), past(v), gerund(v)):
            if f not in forms and f != v:
                forms.append(f)
        groups.append((v, forms))
    for lemma, forms in groups:
        for f in [lemma] + forms:
            if f in seen and seen[f] != lemma:
                sys.exit(f"form {f} shared by {seen[f]} and {lemma}")
            seen[f] = lemma
            if f not in spell:
                sys.exit(f"form {f} of {lemma} not in word list")

    for word, confs in CONFUSIONS.items():
        for c in confs:
            if c == word:
                sys.exit(f"self-loop {word}")

    overlap = set(INSERTIONS) & set(DELETIONS)
    if overlap:
        sys.exit(f"insertion/deletion overlap {overlap}")

    top = top_n_list("en", 120000)
    dictionary = []
    chosen = set()
    for w in top:
        if w.isalpha() and w.isascii() and w in spell and w not in chosen:
            dictionary.append(w)
            chosen.add(w)
            if len(dictionary) == 50000:
                break
    must = set(seen) | set(CONFUSIONS) | set(INSERTIONS) | set(DELETIONS)
    for w in sorted(must):
        if w not in chosen and w in spell:
            dictionary.append(w)
            chosen.add(w)
    misspelled = {c for cs in CONFUSIONS.values() for c in cs if c not in spell}
    dictionary = [w for w in dictionary if w not in misspelled]

    with open(OUT / "verbs.txt", "w") as f:
        f.write("# lemma: inflected forms\n")
        for lemma, forms in groups:
            f.write(f"{lemma}: {', '.join(forms)}\n")
    with open(OUT / "confusions.txt", "w") as f:
        f.write("# word: commonly confused counterparts\n")
        for word, confs in CONFUSIONS.items():
            f.write(f"{word}: {', '.join(confs)}\n")
    with open(OUT / "insertions.txt", "w") as f:
        f.write("# words commonly inserted by learners\n")
        f.write("\n".join(INSERTIONS) + "\n")
    with open(OUT / "deletions.txt", "w") as f:
        f.write("# words commonly omitted by learners\n")
        f.write("\n".join(DELETIONS) + "\n")
    with open(OUT / "dictionary.txt", "w") as f:
        f.write("# English word forms, frequency ordered\n")
        f.write("\n".join(dictionary) + "\n")
    print(len(groups), "verb groups;", len(CONFUSIONS), "confusion entries;", len(dictionary), "dictionary words")


if __name__ == "__main__":
    main()
