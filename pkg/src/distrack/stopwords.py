"""Bundled bilingual (English/Spanish) stop-word list.

Covers determiners, conjunctions, adpositions, common adverbs, pronouns
and auxiliary verbs for both languages.  The list is intentionally fixed
and bundled so that keyword extraction works offline and identically on
every machine.
"""

from __future__ import annotations

_ENGLISH = """
a an the this that these those some any each every either neither no none
and or but nor so yet if then than because although though while whereas
of in on at by for with without against from to into onto over under
between among through during before after above below up down out off
about around near behind beyond within upon per via
i you he she it we they me him her us them my your his its our their
mine yours hers ours theirs myself yourself himself herself itself
ourselves themselves who whom whose which what
be am is are was were been being
do does did doing done
have has had having
will would shall should can could may might must
not never also very too quite rather just only even still already
here there now then today yesterday tomorrow soon always often sometimes
rarely seldom again once twice almost perhaps maybe instead otherwise
however therefore thus hence moreover furthermore meanwhile
as such both all most more less least few many much several own same
other another else when where why how
"""

_SPANISH = """
el la los las un una unos unas lo al del
este esta estos estas ese esa esos esas aquel aquella aquellos aquellas
algun alguno alguna algunos algunas ningun ninguno ninguna cada todo toda
todos todas otro otra otros otras mismo misma mismos mismas tal tales
y e o u ni pero sino aunque porque pues si cuando mientras como que
de en a ante bajo cabe con contra desde durante entre hacia hasta
mediante para por segun sin sobre tras
yo tu usted el ella ello nosotros nosotras vosotros vosotras ustedes
ellos ellas me te se nos os le les les mi mis tus su sus nuestro nuestra
nuestros nuestras vuestro vuestra vuestros vuestras
ser soy eres es somos sois son era eras eramos erais eran fue fui fuiste
fuimos fuisteis fueron sido siendo
estar estoy estas esta estamos estais estan estaba estaban estuvo
haber he has ha hemos habeis han habia habian hay hubo
tener tengo tienes tiene tenemos teneis tienen tenia tenian tuvo
hacer hago haces hace hacemos haceis hacen hacia hacian hizo
poder puedo puedes puede podemos podeis pueden podia podian pudo
deber debo debes debe debemos debeis deben debia debian
no nunca jamas tambien tampoco muy mas menos tan tanto solo solamente
ya aun todavia ahora luego despues antes aqui alli alla hoy ayer manana
siempre nunca quizas quiza acaso ademas entonces asi casi apenas
donde cuando cuanto cuanta cuantos cuantas quien quienes cual cuales
"""

STOP_WORDS: frozenset[str] = frozenset((_ENGLISH + _SPANISH).split())


def is_stop_word(token: str) -> bool:
    return token.lower() in STOP_WORDS
