from bosonic_cert.witnesses.base import *
from bosonic_cert.witnesses.ordering import *
from bosonic_cert.witnesses.lowering import *
from bosonic_cert.witnesses.builders import *
from bosonic_cert.witnesses.decomposition import *
