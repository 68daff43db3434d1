from dsmspy.interface import ServingSystem
