# UnclonableLab - Laboratoire de chiffrement inclonable et d'obfuscation quantique
__version__ = "1.0.0"
__author__ = "Edvance"
