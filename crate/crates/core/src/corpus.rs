//! A small built-in question/answer corpus for offline experiments and
//! fixtures. Answers are plain, factual, emoji- and markdown-free prose of
//! roughly similar length, so stylistic edits start from a neutral
//! baseline.

/// (question, initial answer) pairs.
pub const SAMPLE_QA: [(&str, &str); 50] = [
    (
        "Why is the sky blue during the day?",
        "The sky appears blue because molecules in the atmosphere scatter shorter wavelengths \
of sunlight more strongly than longer ones. Blue light is scattered in every direction and \
reaches your eyes from all over the sky, while red light passes through more directly.",
    ),
    (
        "What is the boiling point of water at sea level?",
        "At standard sea-level pressure, pure water boils at 100 degrees Celsius, which equals \
212 degrees Fahrenheit. The boiling point falls as altitude rises because the surrounding air \
pressure is lower, so mountain cooking takes noticeably longer than cooking at the coast.",
    ),
    (
        "How does a refrigerator keep food cold?",
        "A refrigerator moves heat from the inside of the cabinet to the room. A compressor \
circulates refrigerant that evaporates inside the cold compartment, absorbing heat, and then \
condenses in coils outside the cabinet, releasing that heat into the kitchen.",
    ),
    (
        "What causes tides in the ocean?",
        "Tides are caused mainly by the gravitational pull of the Moon and, to a lesser degree, \
the Sun. Water on the side of Earth facing the Moon is pulled toward it, and water on the far \
side bulges outward as well, producing roughly two high tides and two low tides each day.",
    ),
    (
        "How do vaccines protect against disease?",
        "A vaccine shows the immune system a harmless version or fragment of a pathogen so it \
can learn to recognize it. The body builds antibodies and memory cells in advance, which lets \
it respond quickly and strongly if the real pathogen ever appears.",
    ),
    (
        "What is compound interest?",
        "Compound interest is interest calculated on both the original principal and the \
interest that has already been added to it. Because each period's growth is applied to a \
larger balance, savings grow faster over time than they would under simple interest.",
    ),
    (
        "Why do leaves change color in autumn?",
        "Leaves look green in summer because chlorophyll dominates their pigments. As days \
shorten and temperatures drop, trees stop producing chlorophyll, and the yellow and orange \
carotenoids underneath become visible, while some species also produce red anthocyanins.",
    ),
    (
        "How does GPS determine your location?",
        "A GPS receiver listens to timing signals broadcast by satellites with very precise \
clocks. By measuring how long each signal took to arrive from at least four satellites, the \
receiver computes its distance to each one and solves for its own position on Earth.",
    ),
    (
        "What is the difference between weather and climate?",
        "Weather describes the state of the atmosphere at a particular place and time, such as \
today's rain or wind. Climate is the statistical pattern of weather over decades, describing \
what conditions are typical for a region rather than what is happening right now.",
    ),
    (
        "Why does bread rise when baked?",
        "Bread rises because yeast ferments sugars in the dough and releases carbon dioxide \
gas. The gas is trapped in the elastic gluten network, inflating small pockets, and the heat \
of the oven expands those pockets further before the structure sets.",
    ),
    (
        "How do airplanes stay in the air?",
        "An airplane stays aloft because its wings generate lift. As the wing moves forward, \
it deflects air downward and the pressure above the wing becomes lower than the pressure \
below it. When lift equals the aircraft's weight, the plane holds its altitude.",
    ),
    (
        "What is photosynthesis?",
        "Photosynthesis is the process by which plants, algae, and some bacteria convert light \
energy into chemical energy. Using sunlight, water, and carbon dioxide, they produce glucose \
for fuel and release oxygen as a byproduct from their leaves.",
    ),
    (
        "Why is the ocean salty?",
        "Rivers slowly dissolve minerals from rocks and carry them to the sea. Water \
evaporates from the ocean surface and falls again as rain, but the dissolved salts stay \
behind and accumulate, which over millions of years has made seawater noticeably salty.",
    ),
    (
        "How does a microwave oven heat food?",
        "A microwave oven emits electromagnetic waves tuned to agitate water molecules. The \
waves make polar molecules in the food rotate rapidly, and that molecular motion is heat. \
Dense or dry regions warm more slowly, which is why stirring helps even out the temperature.",
    ),
    (
        "What causes earthquakes?",
        "Most earthquakes happen when stress that has built up along a fault between tectonic \
plates is released suddenly. The plates usually creep past each other slowly, but where they \
stick, energy accumulates until the rock slips and radiates seismic waves.",
    ),
    (
        "Why do we dream?",
        "Researchers have not settled on a single answer, but leading accounts link dreaming \
to memory consolidation and emotional processing during sleep. During REM sleep the brain \
replays and reorganizes experiences, and dreams may be a byproduct of that activity.",
    ),
    (
        "How is steel different from iron?",
        "Steel is an alloy made mostly of iron with a small, controlled amount of carbon, \
typically under two percent. The carbon atoms distort the iron lattice and block \
dislocations, making steel much stronger and harder than pure iron while staying workable.",
    ),
    (
        "What is inflation in economics?",
        "Inflation is a sustained rise in the general level of prices, which means each unit \
of currency buys less over time. Moderate inflation is common in growing economies, but high \
or unpredictable inflation erodes savings and makes planning difficult.",
    ),
    (
        "Why does ice float on water?",
        "Ice floats because water expands when it freezes. The hydrogen bonds lock molecules \
into an open hexagonal lattice that takes up more volume than the liquid, so ice is about \
nine percent less dense than liquid water and is buoyed to the surface.",
    ),
    (
        "How do noise-cancelling headphones work?",
        "Active noise-cancelling headphones use small microphones to sample ambient sound and \
then play an inverted copy of that sound through the speakers. The opposing waves cancel \
each other, which is most effective for steady low-frequency noise like engine hum.",
    ),
    (
        "What is the purpose of a hash function?",
        "A hash function maps data of arbitrary size to a fixed-size value. Good hash \
functions spread inputs evenly and are fast to compute, which makes them useful for hash \
tables, data integrity checks, and indexing, where similar inputs should not collide often.",
    ),
    (
        "Why do cats purr?",
        "Cats purr by vibrating the muscles of the larynx as they breathe. Purring often \
signals contentment, but cats also purr when stressed or injured, and some researchers think \
the low-frequency vibration may aid healing and communication with humans.",
    ),
    (
        "How does soap clean grease?",
        "Soap molecules have a water-loving head and an oil-loving tail. The tails embed \
themselves in grease while the heads face outward into the water, breaking the grease into \
tiny droplets called micelles that rinse away with the wash water.",
    ),
    (
        "What is machine learning?",
        "Machine learning is a family of methods that let computers improve at a task by \
learning patterns from data instead of following hand-written rules. A model is trained on \
examples, evaluated on unseen cases, and adjusted until its predictions generalize well.",
    ),
    (
        "Why is exercise good for the heart?",
        "Regular aerobic exercise strengthens the heart muscle so it pumps more blood per \
beat, lowers resting heart rate and blood pressure, and improves cholesterol balance. \
Together these effects reduce strain on arteries and the long-term risk of heart disease.",
    ),
    (
        "How do bees make honey?",
        "Bees collect flower nectar and carry it back to the hive, where worker bees pass it \
mouth to mouth, adding enzymes that break down its sugars. They spread the liquid in \
honeycomb cells and fan it with their wings until it thickens into honey, then cap the cells \
with wax.",
    ),
    (
        "What is the role of DNA?",
        "DNA stores the genetic instructions a cell needs to build and regulate proteins. Its \
sequence of bases is transcribed into RNA and translated into proteins, and it is copied \
when cells divide so the instructions pass to the next generation.",
    ),
    (
        "Why do onions make you cry?",
        "Cutting an onion breaks cells and mixes enzymes with sulfur compounds, producing a \
volatile gas. When the gas reaches your eyes it forms a mild sulfenic acid on the moist \
surface, and the eyes respond by producing tears to wash the irritant away.",
    ),
    (
        "How does a battery store energy?",
        "A battery stores energy chemically in two electrodes separated by an electrolyte. \
When a circuit connects the terminals, oxidation at one electrode releases electrons that \
flow through the device to the other electrode, where reduction consumes them.",
    ),
    (
        "What is supply and demand?",
        "Supply and demand describe how prices form in a market. When a good is scarce \
relative to how much people want it, the price tends to rise; when it is abundant, the price \
tends to fall. The market clears near the price where the two quantities balance.",
    ),
    (
        "Why does the Moon have phases?",
        "The Moon shines by reflecting sunlight, and half of it is always lit. As the Moon \
orbits Earth about once a month, we see changing fractions of that lit half, which produces \
the cycle from new moon through crescent, quarter, gibbous, and full.",
    ),
    (
        "How do muscles grow after training?",
        "Strength training creates microscopic damage in muscle fibers. During recovery the \
body repairs the fibers and adds new protein strands, making them thicker and stronger. \
Adequate protein intake and rest between sessions are what allow that adaptation to occur.",
    ),
    (
        "What is an algorithm?",
        "An algorithm is a finite, well-defined sequence of steps for solving a problem or \
computing a result. Recipes and long division are everyday examples. In computing, \
algorithms are judged by correctness and by how their time and memory needs grow with input \
size.",
    ),
    (
        "Why is recycling aluminum worthwhile?",
        "Recycling aluminum saves about ninety-five percent of the energy needed to smelt new \
metal from bauxite ore. The metal can be remelted repeatedly without losing quality, so a \
recycled can returns to the shelf quickly and with a far smaller energy footprint.",
    ),
    (
        "How does the immune system recognize pathogens?",
        "Immune cells carry receptors that bind molecular patterns common to microbes, and \
adaptive cells refine receptors that match specific antigens. Once a pathogen is recognized, \
signaling molecules recruit defenses and memory cells record the encounter for next time.",
    ),
    (
        "What makes a rainbow appear?",
        "A rainbow appears when sunlight enters raindrops, bends, reflects off the back of \
each drop, and bends again on the way out. Different wavelengths bend by different amounts, \
separating white light into a colored arc opposite the Sun in the sky.",
    ),
    (
        "Why do some metals rust?",
        "Rust forms when iron reacts with oxygen in the presence of water, producing hydrated \
iron oxides. The oxide layer is flaky and porous, so it exposes fresh metal and the reaction \
continues. Coatings, alloying, and sacrificial anodes are common ways to slow it.",
    ),
    (
        "How does yeast fermentation produce alcohol?",
        "In the absence of oxygen, yeast breaks down sugars for energy and excretes ethanol \
and carbon dioxide as byproducts. Brewers and winemakers control temperature, sugar, and \
yeast strain to steer how much alcohol forms and which flavor compounds develop.",
    ),
    (
        "What is the greenhouse effect?",
        "Certain atmospheric gases let sunlight reach the surface but absorb the infrared \
radiation the warm surface emits, re-radiating part of it back down. This traps heat near \
the surface; adding more of those gases strengthens the effect and warms the climate.",
    ),
    (
        "Why do ships made of steel float?",
        "A ship floats because flotation depends on average density, not material. The hull \
encloses a large volume of air, so the ship as a whole is less dense than water. It sinks \
only until the weight of the displaced water equals the ship's own weight.",
    ),
    (
        "How does encryption protect messages?",
        "Encryption transforms readable text into ciphertext using a key, so intercepted \
messages are useless without the matching key. Modern schemes rest on mathematical problems \
that are easy to compute forward but impractical to reverse without the secret.",
    ),
    (
        "What causes thunder?",
        "Lightning heats a narrow channel of air to tens of thousands of degrees within \
microseconds. The air expands explosively and then contracts, launching a shock wave that \
decays into the rumble we hear. Counting seconds to the thunder estimates the distance.",
    ),
    (
        "Why do we need sleep?",
        "Sleep supports memory consolidation, tissue repair, immune function, and the \
clearing of metabolic waste from the brain. Chronic sleep loss degrades attention and mood \
and raises long-term health risks, which is why adults are advised to get seven to nine \
hours.",
    ),
    (
        "How is glass made?",
        "Common glass is made by melting silica sand with soda ash and limestone at very high \
temperature. The molten mixture is shaped by floating it on molten tin, blowing, or molding, \
and then cooled in a controlled way so internal stresses do not crack it.",
    ),
    (
        "What is a prime number?",
        "A prime number is a whole number greater than one whose only divisors are one and \
itself. Primes are the building blocks of the integers because every whole number factors \
uniquely into primes, a fact used throughout number theory and cryptography.",
    ),
    (
        "Why does hot air rise?",
        "Heating air makes its molecules move faster and spread out, lowering its density \
relative to the cooler air around it. Buoyancy then pushes the lighter warm air upward while \
denser cool air sinks to replace it, driving convection currents in rooms and weather.",
    ),
    (
        "How do plants absorb water?",
        "Plants draw water in through root hairs by osmosis and conduct it upward through \
xylem vessels. Evaporation from leaf pores creates tension that pulls the connected column \
of water up the stem, a mechanism that works even in very tall trees.",
    ),
    (
        "What is the function of red blood cells?",
        "Red blood cells transport oxygen from the lungs to tissues and help carry carbon \
dioxide back. They are packed with hemoglobin, an iron-containing protein that binds oxygen \
where it is plentiful and releases it where tissues need it.",
    ),
    (
        "Why do time zones exist?",
        "Time zones keep clock time roughly aligned with the position of the Sun as Earth \
rotates. Before standardization, each town kept its own solar time, which made rail \
schedules chaotic; zones replaced that patchwork with broad regions sharing one civil time.",
    ),
    (
        "How does a compass work?",
        "A compass needle is a small magnet balanced on a low-friction pivot. Earth's \
magnetic field applies a torque that swings the needle until it aligns with the field lines, \
so one end points toward magnetic north, which navigators correct to true north.",
    ),
];

/// The corpus as owned records, handy for building datasets.
pub fn sample_qa() -> Vec<(String, String)> {
    SAMPLE_QA
        .iter()
        .map(|(q, a)| (q.to_string(), a.to_string()))
        .collect()
}
